//! Line-oriented problem file format.
//!
//! ```text
//! # comment
//! [domain]
//! nx = 60
//! ny = 20
//! elem_size_mm = 1
//! thickness_mm = 1
//!
//! [material]
//! preset = AA6061          # or young_gpa, poisson, density_g_cm3, yield_mpa, safety_factor
//!
//! [loads]
//! load = 60,0,0,-1000      # i,j,fx_n,fy_n (repeatable)
//! couple = 0,10,0,12,360   # i1,j1,i2,j2,torque_nm (repeatable)
//! gravity_m_s2 = 9.8066    # downward magnitude, or gx,gy
//!
//! [supports]
//! fix = 3,0,y              # i,j,x|y|both (repeatable)
//! fix_edge = left,both     # left|right|top|bottom,x|y|both (repeatable)
//!
//! [optimization]
//! volfrac = 0.5
//! penal = 3
//! rmin_elem = 1.5
//!
//! [passive]
//! solid_rect = 0,0,4,2     # inclusive element indices i0,j0,i1,j1 (repeatable)
//! void_rect = 10,5,12,8
//! ```
//!
//! Quantities are converted to SI when parsed. [`serialize_problem`] writes a canonical form
//! that parses back to an identical [`OptimizationProblem`].

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{
    validate_problem, Component, GridMesh, LoadCase, Material, OptimizationProblem, SimpParams, DEFAULT_X_MIN,
};

const SECTIONS: &[(&str, &[(&str, bool)])] = &[
    (
        "domain",
        &[("nx", false), ("ny", false), ("elem_size_mm", false), ("thickness_mm", false)],
    ),
    (
        "material",
        &[
            ("preset", false),
            ("young_gpa", false),
            ("poisson", false),
            ("density_g_cm3", false),
            ("yield_mpa", false),
            ("safety_factor", false),
        ],
    ),
    ("loads", &[("load", true), ("couple", true), ("gravity_m_s2", false)]),
    ("supports", &[("fix", true), ("fix_edge", true)]),
    (
        "optimization",
        &[
            ("volfrac", false),
            ("penal", false),
            ("rmin_elem", false),
            ("move", false),
            ("eta", false),
            ("x_min", false),
            ("max_iters", false),
            ("tol_change", false),
        ],
    ),
    ("passive", &[("solid_rect", true), ("void_rect", true)]),
];

// file unit -> SI
fn gpa(v: f64) -> f64 {
    v * 1e9
}
fn mpa(v: f64) -> f64 {
    v * 1e6
}
fn g_cm3(v: f64) -> f64 {
    v * 1e3
}
fn mm(v: f64) -> f64 {
    v / 1e3
}

#[derive(Debug)]
struct Entry {
    line: usize,
    value: String,
}

struct Document {
    entries: BTreeMap<(&'static str, &'static str), Vec<Entry>>,
    headers: BTreeMap<&'static str, usize>,
    last_line: usize,
}

impl Document {
    fn parse(text: &str) -> Result<Self> {
        let mut doc = Document {
            entries: BTreeMap::new(),
            headers: BTreeMap::new(),
            last_line: text.lines().count().max(1),
        };
        let mut section: Option<(&'static str, &'static [(&'static str, bool)])> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let name = name.trim();
                let found = SECTIONS
                    .iter()
                    .find(|(s, _)| *s == name)
                    .ok_or_else(|| Error::parse(line, format!("unknown section [{name}]")))?;
                if doc.headers.insert(found.0, line).is_some() {
                    return Err(Error::parse(line, format!("duplicate section [{name}]")));
                }
                section = Some(*found);
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::parse(line, format!("expected `key = value`, found `{content}`")));
            };
            let key = key.trim();
            let Some((sname, keys)) = section else {
                return Err(Error::parse(line, format!("key `{key}` appears before any [section]")));
            };
            let Some(&(kname, repeatable)) = keys.iter().find(|(k, _)| *k == key) else {
                return Err(Error::parse(line, format!("unknown key `{key}` in section [{sname}]")));
            };
            let slot = doc.entries.entry((sname, kname)).or_default();
            if !repeatable && !slot.is_empty() {
                return Err(Error::parse(
                    line,
                    format!("duplicate key `{key}` in section [{sname}] (first on line {})", slot[0].line),
                ));
            }
            slot.push(Entry {
                line,
                value: value.trim().to_string(),
            });
        }
        Ok(doc)
    }

    fn all(&self, section: &'static str, key: &'static str) -> &[Entry] {
        self.entries.get(&(section, key)).map(Vec::as_slice).unwrap_or(&[])
    }

    fn get(&self, section: &'static str, key: &'static str) -> Option<&Entry> {
        self.all(section, key).first()
    }

    fn require(&self, section: &'static str, key: &'static str) -> Result<&Entry> {
        self.get(section, key).ok_or_else(|| {
            let line = self.headers.get(section).copied().unwrap_or(self.last_line);
            Error::parse(line, format!("missing required key `{key}` in section [{section}]"))
        })
    }
}

impl Entry {
    fn number<T: std::str::FromStr>(&self, what: &str) -> Result<T> {
        self.value
            .parse()
            .map_err(|_| Error::parse(self.line, format!("malformed {what}: `{}`", self.value)))
    }

    fn fields(&self, expected: &[usize], what: &str) -> Result<Vec<&str>> {
        let parts: Vec<&str> = self.value.split(',').map(str::trim).collect();
        if !expected.contains(&parts.len()) {
            return Err(Error::parse(
                self.line,
                format!("malformed {what}: `{}` has {} fields", self.value, parts.len()),
            ));
        }
        Ok(parts)
    }

    fn field<T: std::str::FromStr>(&self, s: &str, what: &str) -> Result<T> {
        s.parse()
            .map_err(|_| Error::parse(self.line, format!("malformed {what}: `{s}` in `{}`", self.value)))
    }

    fn node(&self, mesh: &GridMesh, i: &str, j: &str) -> Result<usize> {
        let (i, j): (usize, usize) = (self.field(i, "node index")?, self.field(j, "node index")?);
        if i > mesh.nx() || j > mesh.ny() {
            return Err(Error::parse(
                self.line,
                format!("node ({i},{j}) outside the {}x{} node grid", mesh.nx() + 1, mesh.ny() + 1),
            ));
        }
        Ok(mesh.node_index(i, j))
    }
}

fn directions(entry: &Entry, s: &str) -> Result<(bool, bool)> {
    match s {
        "x" => Ok((true, false)),
        "y" => Ok((false, true)),
        "both" => Ok((true, true)),
        _ => Err(Error::parse(entry.line, format!("malformed direction `{s}`: expected x, y or both"))),
    }
}

/// Parses a problem file into a validated [`OptimizationProblem`].
pub fn parse_problem(text: &str) -> Result<OptimizationProblem> {
    let doc = Document::parse(text)?;

    let nx: usize = doc.require("domain", "nx")?.number("nx")?;
    let ny: usize = doc.require("domain", "ny")?.number("ny")?;
    let size: f64 = doc.require("domain", "elem_size_mm")?.number("elem_size_mm")?;
    let thick: f64 = doc.require("domain", "thickness_mm")?.number("thickness_mm")?;
    let mesh = GridMesh::new(nx, ny, mm(size), mm(thick))
        .map_err(|e| Error::parse(doc.require("domain", "nx").map(|e| e.line).unwrap_or(1), e.to_string()))?;

    let material = parse_material(&doc)?;

    let mut loads = LoadCase::new();
    // (line, first index into point_loads) of each load-producing entry
    let mut origins = Vec::new();
    for e in doc.all("loads", "load") {
        let f = e.fields(&[4], "load (expected i,j,fx_n,fy_n)")?;
        let node = e.node(&mesh, f[0], f[1])?;
        let (fx, fy): (f64, f64) = (e.field(f[2], "force")?, e.field(f[3], "force")?);
        origins.push((e.line, loads.point_loads.len()));
        if fx != 0.0 {
            loads = loads.with_load(node, Component::X, fx);
        }
        if fy != 0.0 {
            loads = loads.with_load(node, Component::Y, fy);
        }
    }
    for e in doc.all("loads", "couple") {
        let f = e.fields(&[5], "couple (expected i1,j1,i2,j2,torque_nm)")?;
        let a = e.node(&mesh, f[0], f[1])?;
        let b = e.node(&mesh, f[2], f[3])?;
        let torque: f64 = e.field(f[4], "torque")?;
        origins.push((e.line, loads.point_loads.len()));
        loads = loads
            .with_couple(&mesh, a, b, torque)
            .map_err(|err| Error::parse(e.line, err.to_string()))?;
    }
    if let Some(e) = doc.get("loads", "gravity_m_s2") {
        let f = e.fields(&[1, 2], "gravity_m_s2 (expected g or gx,gy)")?;
        loads.gravity = match f[..] {
            [g] => [0.0, -e.field::<f64>(g, "gravity")?],
            _ => [e.field(f[0], "gravity")?, e.field(f[1], "gravity")?],
        };
    }

    for e in doc.all("supports", "fix") {
        let f = e.fields(&[3], "fix (expected i,j,x|y|both)")?;
        let node = e.node(&mesh, f[0], f[1])?;
        let (x, y) = directions(e, f[2])?;
        loads = loads.fix_node(node, x, y);
    }
    for e in doc.all("supports", "fix_edge") {
        let f = e.fields(&[2], "fix_edge (expected side,x|y|both)")?;
        let (x, y) = directions(e, f[1])?;
        let nodes: Vec<usize> = match f[0] {
            "left" => (0..=ny).map(|j| mesh.node_index(0, j)).collect(),
            "right" => (0..=ny).map(|j| mesh.node_index(nx, j)).collect(),
            "bottom" => (0..=nx).map(|i| mesh.node_index(i, 0)).collect(),
            "top" => (0..=nx).map(|i| mesh.node_index(i, ny)).collect(),
            s => {
                return Err(Error::parse(
                    e.line,
                    format!("malformed edge `{s}`: expected left, right, top or bottom"),
                ))
            }
        };
        for n in nodes {
            loads = loads.fix_node(n, x, y);
        }
    }
    for (k, &(line, start)) in origins.iter().enumerate() {
        let end = origins.get(k + 1).map_or(loads.point_loads.len(), |o| o.1);
        if let Some(p) = loads.point_loads[start..end].iter().find(|p| loads.fixed_dofs.contains(&p.dof())) {
            let (i, j) = mesh.node_ij(p.node);
            return Err(Error::parse(line, format!("load applied on fixed DOF {} (node {i},{j})", p.dof())));
        }
    }

    let defaults = SimpParams::default();
    let opt = |key: &'static str, default: f64| -> Result<f64> {
        doc.get("optimization", key).map_or(Ok(default), |e| e.number(key))
    };
    let params = SimpParams {
        volfrac: doc.require("optimization", "volfrac")?.number("volfrac")?,
        penal: doc.require("optimization", "penal")?.number("penal")?,
        rmin: doc.require("optimization", "rmin_elem")?.number("rmin_elem")?,
        move_limit: opt("move", defaults.move_limit)?,
        eta: opt("eta", defaults.eta)?,
        max_iters: doc
            .get("optimization", "max_iters")
            .map_or(Ok(defaults.max_iters), |e| e.number("max_iters"))?,
        tol_change: opt("tol_change", defaults.tol_change)?,
    };
    let x_min = opt("x_min", DEFAULT_X_MIN)?;

    let n = mesh.element_count();
    let mut solid = vec![false; n];
    let mut void = vec![false; n];
    for (key, mask) in [("solid_rect", &mut solid), ("void_rect", &mut void)] {
        for e in doc.all("passive", key) {
            let f = e.fields(&[4], "rectangle (expected i0,j0,i1,j1)")?;
            let v: Vec<usize> = f.iter().map(|s| e.field(s, "element index")).collect::<Result<_>>()?;
            let (i0, j0, i1, j1) = (v[0], v[1], v[2], v[3]);
            if i0 > i1 || j0 > j1 || i1 >= nx || j1 >= ny {
                return Err(Error::parse(
                    e.line,
                    format!("rectangle {i0},{j0},{i1},{j1} is empty or outside the {nx}x{ny} element grid"),
                ));
            }
            for j in j0..=j1 {
                for i in i0..=i1 {
                    mask[mesh.element_index(i, j)] = true;
                }
            }
        }
    }
    let overlap: Vec<usize> = (0..n).filter(|&e| solid[e] && void[e]).collect();
    if !overlap.is_empty() {
        return Err(Error::InvalidProblem(vec![format!(
            "passive solid and void masks overlap at elements {overlap:?}"
        )]));
    }

    let problem = OptimizationProblem::new(mesh, material, loads, solid, void, x_min, params)?;
    validate_problem(&problem).map_err(Error::InvalidProblem)?;
    Ok(problem)
}

fn parse_material(doc: &Document) -> Result<Material> {
    let mut m = match doc.get("material", "preset") {
        Some(e) => Material::preset(&e.value)
            .ok_or_else(|| Error::parse(e.line, format!("unknown material preset `{}`", e.value)))?,
        None => {
            for key in ["young_gpa", "poisson", "density_g_cm3", "yield_mpa", "safety_factor"] {
                doc.require("material", key)?;
            }
            Material::AA6061
        }
    };
    let set = |key: &'static str, slot: &mut f64, convert: fn(f64) -> f64| -> Result<()> {
        if let Some(e) = doc.get("material", key) {
            *slot = convert(e.number(key)?);
        }
        Ok(())
    };
    set("young_gpa", &mut m.young_modulus, gpa)?;
    set("poisson", &mut m.poisson, |v| v)?;
    set("density_g_cm3", &mut m.density, g_cm3)?;
    set("yield_mpa", &mut m.yield_strength, mpa)?;
    set("safety_factor", &mut m.safety_factor, |v| v)?;
    Ok(m)
}

/// File-unit value whose conversion reproduces `si` exactly, when one exists nearby.
fn in_file_units(si: f64, to_si: fn(f64) -> f64, from_si: impl Fn(f64) -> f64) -> f64 {
    let guess = from_si(si);
    if to_si(guess) == si || !guess.is_finite() {
        return guess;
    }
    let (mut up, mut down) = (guess, guess);
    for _ in 0..64 {
        up = up.next_up();
        down = down.next_down();
        if to_si(up) == si {
            return up;
        }
        if to_si(down) == si {
            return down;
        }
    }
    guess
}

/// Canonical text form of `problem`. Couples appear as the point loads they were lowered to.
pub fn serialize_problem(problem: &OptimizationProblem) -> String {
    let OptimizationProblem {
        mesh,
        material,
        loads,
        design,
        params,
    } = problem;
    let mut s = String::new();
    let mut line = |text: String| {
        s.push_str(&text);
        s.push('\n');
    };

    line("[domain]".into());
    line(format!("nx = {}", mesh.nx()));
    line(format!("ny = {}", mesh.ny()));
    line(format!("elem_size_mm = {}", in_file_units(mesh.elem_size(), mm, |v| v * 1e3)));
    line(format!("thickness_mm = {}", in_file_units(mesh.thickness(), mm, |v| v * 1e3)));

    line(String::new());
    line("[material]".into());
    line(format!("young_gpa = {}", in_file_units(material.young_modulus, gpa, |v| v / 1e9)));
    line(format!("poisson = {}", material.poisson));
    line(format!("density_g_cm3 = {}", in_file_units(material.density, g_cm3, |v| v / 1e3)));
    line(format!("yield_mpa = {}", in_file_units(material.yield_strength, mpa, |v| v / 1e6)));
    line(format!("safety_factor = {}", material.safety_factor));

    line(String::new());
    line("[loads]".into());
    for p in &loads.point_loads {
        let (i, j) = mesh.node_ij(p.node);
        let (fx, fy) = match p.component {
            Component::X => (p.magnitude, 0.0),
            Component::Y => (0.0, p.magnitude),
        };
        line(format!("load = {i},{j},{fx},{fy}"));
    }
    match loads.gravity {
        [gx, gy] if gx == 0.0 && gy == 0.0 => {}
        [gx, gy] if gx == 0.0 && gy < 0.0 => line(format!("gravity_m_s2 = {}", -gy)),
        [gx, gy] => line(format!("gravity_m_s2 = {gx},{gy}")),
    }

    line(String::new());
    line("[supports]".into());
    for node in loads.fixed_nodes() {
        let (i, j) = mesh.node_ij(node);
        let dir = match (loads.fixed_dofs.contains(&(2 * node)), loads.fixed_dofs.contains(&(2 * node + 1))) {
            (true, true) => "both",
            (true, false) => "x",
            _ => "y",
        };
        line(format!("fix = {i},{j},{dir}"));
    }

    line(String::new());
    line("[optimization]".into());
    line(format!("volfrac = {}", params.volfrac));
    line(format!("penal = {}", params.penal));
    line(format!("rmin_elem = {}", params.rmin));
    line(format!("move = {}", params.move_limit));
    line(format!("eta = {}", params.eta));
    line(format!("x_min = {}", design.x_min()));
    line(format!("max_iters = {}", params.max_iters));
    line(format!("tol_change = {}", params.tol_change));

    line(String::new());
    line("[passive]".into());
    for (key, mask) in [("solid_rect", design.passive_solid()), ("void_rect", design.passive_void())] {
        for j in 0..mesh.ny() {
            let mut i = 0;
            while i < mesh.nx() {
                if mask[mesh.element_index(i, j)] {
                    let start = i;
                    while i + 1 < mesh.nx() && mask[mesh.element_index(i + 1, j)] {
                        i += 1;
                    }
                    line(format!("{key} = {start},{j},{i},{j}"));
                }
                i += 1;
            }
        }
    }
    s
}
