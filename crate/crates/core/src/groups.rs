//! Small finite groups with their unitary irreducible representations.
//!
//! Groups are enumerated from a faithful matrix representation by breadth-first
//! closure over the generators, which also fixes the element order and the
//! multiplication table. Irreducible representations are specified on the
//! generators and propagated along the same words.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::opcore::{OperatorMatrix, C64};

/// Unitary irreducible representation, one image per group element.
#[derive(Debug, Clone)]
pub struct Irrep {
    pub label: String,
    pub dim: usize,
    pub images: Vec<OperatorMatrix>,
}

#[derive(Debug, Clone)]
pub struct FiniteGroup {
    pub name: String,
    /// `table[g][h]` is the index of `g·h`.
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    pub irreps: Vec<Irrep>,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.table.len()
    }
}

struct IrrepSpec {
    label: String,
    generators: Vec<OperatorMatrix>,
}

fn cplx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn mat(rows: usize, cols: usize, data: &[C64]) -> OperatorMatrix {
    OperatorMatrix::from_row_slice(rows, cols, data).expect("static generator data")
}

fn closure(name: &str, faithful: Vec<OperatorMatrix>, specs: Vec<IrrepSpec>, max_order: usize) -> Result<FiniteGroup> {
    let n = faithful[0].rows();
    let mut elements = vec![OperatorMatrix::identity(n)];
    let mut irrep_images: Vec<Vec<OperatorMatrix>> =
        specs.iter().map(|s| vec![OperatorMatrix::identity(s.generators[0].rows())]).collect();
    let find = |elements: &[OperatorMatrix], m: &OperatorMatrix| elements.iter().position(|e| e.distance_to(m) < 1e-9);

    let mut frontier = 0;
    while frontier < elements.len() {
        for (gi, g) in faithful.iter().enumerate() {
            let prod = &elements[frontier] * g;
            if find(&elements, &prod).is_none() {
                if elements.len() >= max_order {
                    return Err(Error::ClosureExceeded(max_order));
                }
                elements.push(prod);
                for (k, spec) in specs.iter().enumerate() {
                    let img = &irrep_images[k][frontier] * &spec.generators[gi];
                    irrep_images[k].push(img);
                }
            }
        }
        frontier += 1;
    }

    let order = elements.len();
    let mut table = vec![vec![0; order]; order];
    for i in 0..order {
        for j in 0..order {
            let prod = &elements[i] * &elements[j];
            table[i][j] = find(&elements, &prod).expect("closure is complete");
        }
    }
    let irreps = specs
        .into_iter()
        .zip(irrep_images)
        .map(|(spec, images)| Irrep { label: spec.label, dim: images[0].rows(), images })
        .collect();
    Ok(FiniteGroup { name: name.to_string(), table, identity: 0, irreps })
}

fn cyclic(n: usize) -> Result<FiniteGroup> {
    if n == 0 || n > 120 {
        return Err(Error::UnknownGroup(format!("C{n}")));
    }
    let root = |k: usize| C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
    let faithful = vec![OperatorMatrix::scalar(root(1))];
    let specs = (0..n)
        .map(|k| IrrepSpec { label: format!("chi{k}"), generators: vec![OperatorMatrix::scalar(root(k))] })
        .collect();
    closure(&format!("C{n}"), faithful, specs, n)
}

fn symmetric3() -> Result<FiniteGroup> {
    let (c, s) = ((2.0 * PI / 3.0).cos(), (2.0 * PI / 3.0).sin());
    let r = mat(2, 2, &[cplx(c, 0.0), cplx(-s, 0.0), cplx(s, 0.0), cplx(c, 0.0)]);
    let f = mat(2, 2, &[cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(-1.0, 0.0)]);
    let one = OperatorMatrix::scalar(cplx(1.0, 0.0));
    let minus = OperatorMatrix::scalar(cplx(-1.0, 0.0));
    let specs = vec![
        IrrepSpec { label: "trivial".into(), generators: vec![one.clone(), one.clone()] },
        IrrepSpec { label: "sign".into(), generators: vec![one, minus] },
        IrrepSpec { label: "standard".into(), generators: vec![r.clone(), f.clone()] },
    ];
    closure("S3", vec![r, f], specs, 6)
}

fn quaternion8() -> Result<FiniteGroup> {
    let z = cplx(0.0, 0.0);
    let i = mat(2, 2, &[cplx(0.0, 1.0), z, z, cplx(0.0, -1.0)]);
    let j = mat(2, 2, &[z, cplx(1.0, 0.0), cplx(-1.0, 0.0), z]);
    let s = |x: f64| OperatorMatrix::scalar(cplx(x, 0.0));
    let specs = vec![
        IrrepSpec { label: "trivial".into(), generators: vec![s(1.0), s(1.0)] },
        IrrepSpec { label: "chi_i".into(), generators: vec![s(1.0), s(-1.0)] },
        IrrepSpec { label: "chi_j".into(), generators: vec![s(-1.0), s(1.0)] },
        IrrepSpec { label: "chi_k".into(), generators: vec![s(-1.0), s(-1.0)] },
        IrrepSpec { label: "spin".into(), generators: vec![i.clone(), j.clone()] },
    ];
    closure("Q8", vec![i, j], specs, 8)
}

/// Looks up `C<n>`, `S3` or `Q8`.
pub fn named_group(name: &str) -> Result<FiniteGroup> {
    let upper = name.trim().to_ascii_uppercase();
    match upper.as_str() {
        "S3" => symmetric3(),
        "Q8" => quaternion8(),
        _ => match upper.strip_prefix('C').and_then(|n| n.parse::<usize>().ok()) {
            Some(n) => cyclic(n),
            None => Err(Error::UnknownGroup(name.to_string())),
        },
    }
}

/// Checks that `table` is the multiplication table of a group and returns the
/// identity index.
pub fn validate_table(table: &[Vec<usize>]) -> Result<usize> {
    let n = table.len();
    let bad = |msg: &str| Err(Error::InvalidRepresentation(format!("multiplication table: {msg}")));
    if n == 0 {
        return bad("empty");
    }
    if table.iter().any(|row| row.len() != n || row.iter().any(|&k| k >= n)) {
        return bad("not a square table of element indices");
    }
    let Some(e) = (0..n).find(|&e| (0..n).all(|h| table[e][h] == h && table[h][e] == h)) else {
        return bad("no identity element");
    };
    for g in 0..n {
        if !(0..n).any(|h| table[g][h] == e) {
            return bad("element without inverse");
        }
        for h in 0..n {
            for k in 0..n {
                if table[table[g][h]][k] != table[g][table[h][k]] {
                    return bad("not associative");
                }
            }
        }
    }
    Ok(e)
}

/// Index of the inverse of `g`.
pub fn inverse_index(table: &[Vec<usize>], identity: usize, g: usize) -> usize {
    (0..table.len()).find(|&h| table[g][h] == identity).expect("validated table has inverses")
}
