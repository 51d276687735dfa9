use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::NerveError;
use crate::exactalg::{parse_expr, Chart, ChartData, ChartHom, Poly};

/// A strictly increasing tuple of chart indices.
pub type Face = Vec<usize>;

/// Ordered cover nerve: a simplicial complex on the index set with a chart
/// algebra on every face and restriction homomorphisms for every face
/// inclusion.
#[derive(Clone, Debug)]
pub struct Nerve {
    indices: Vec<String>,
    faces: Vec<Vec<Face>>,
    charts: BTreeMap<Face, Chart>,
    rest: BTreeMap<(Face, Face), ChartHom>,
}

pub type NerveRef = Arc<Nerve>;

/// All proper nonempty subfaces, by decreasing size.
pub fn subfaces(f: &[usize]) -> Vec<Face> {
    let n = f.len();
    let mut out = Vec::new();
    for mask in 1..(1u32 << n) - 1 {
        out.push((0..n).filter(|i| mask & (1 << i) != 0).map(|i| f[i]).collect::<Face>());
    }
    out.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    out
}

/// Remove entry `i` of a tuple.
pub fn delete(f: &[usize], i: usize) -> Face {
    let mut g = f.to_vec();
    g.remove(i);
    g
}

/// Distinct entries of a weakly increasing tuple.
pub fn dedup(t: &[usize]) -> Face {
    let mut f = t.to_vec();
    f.dedup();
    f
}

impl Nerve {
    /// Build from explicit faces with charts and optional restriction maps.
    /// Missing codimension-one restrictions are taken by variable name;
    /// longer inclusions are composed. Functoriality is verified.
    pub fn new(
        indices: Vec<String>,
        faces: Vec<(Face, Chart)>,
        restrictions: Vec<(Face, Face, ChartHom)>,
    ) -> Result<Nerve, NerveError> {
        let k = indices.len();
        let mut charts: BTreeMap<Face, Chart> = BTreeMap::new();
        for (f, c) in faces {
            if f.is_empty() || f.windows(2).any(|w| w[0] >= w[1]) || f.iter().any(|&i| i >= k) {
                return Err(NerveError::BadFace(format!("{:?}", f)));
            }
            if charts.insert(f.clone(), c).is_some() {
                return Err(NerveError::BadFace(format!("{:?} listed twice", f)));
            }
        }
        for i in 0..k {
            if !charts.contains_key(&vec![i]) {
                return Err(NerveError::BadFace(format!("vertex {} has no algebra", indices[i])));
            }
        }
        for f in charts.keys() {
            for s in subfaces(f) {
                if !charts.contains_key(&s) {
                    return Err(NerveError::BadFace(format!("{:?} is missing its subface {:?}", f, s)));
                }
            }
        }
        let mut rest: BTreeMap<(Face, Face), ChartHom> = BTreeMap::new();
        for (s, f, h) in restrictions {
            let (Some(cs), Some(cf)) = (charts.get(&s), charts.get(&f)) else {
                return Err(NerveError::BadFace(format!("restriction {:?} -> {:?} between unknown faces", s, f)));
            };
            if !s.iter().all(|i| f.contains(i)) || s.len() >= f.len() {
                return Err(NerveError::BadFace(format!("{:?} is not a proper subface of {:?}", s, f)));
            }
            if **cs != *h.source || **cf != *h.target {
                return Err(NerveError::BadRestriction(format!("{:?} -> {:?}: charts do not match", s, f)));
            }
            rest.insert((s, f), h);
        }
        let faces_sorted: Vec<Face> = charts.keys().cloned().collect();
        for f in &faces_sorted {
            for s in subfaces(f) {
                if rest.contains_key(&(s.clone(), f.clone())) {
                    continue;
                }
                let h = if s.len() + 1 == f.len() {
                    ChartHom::by_name(&charts[&s], &charts[f])
                        .map_err(|e| NerveError::BadRestriction(format!("{:?} -> {:?}: {}", s, f, e)))?
                } else {
                    // s ⊂ s ∪ {v} ⊂ f with the larger step already known
                    let v = *f.iter().find(|i| !s.contains(i)).unwrap();
                    let mut m = s.clone();
                    m.push(v);
                    m.sort();
                    let first = match rest.get(&(s.clone(), m.clone())) {
                        Some(h) => h.clone(),
                        None => ChartHom::by_name(&charts[&s], &charts[&m])
                            .map_err(|e| NerveError::BadRestriction(format!("{:?} -> {:?}: {}", s, m, e)))?,
                    };
                    rest.insert((s.clone(), m.clone()), first.clone());
                    first.then(&rest[&(m, f.clone())])
                };
                rest.insert((s, f.clone()), h);
            }
        }
        let maxdim = charts.keys().map(|f| f.len()).max().unwrap_or(0);
        let mut by_dim = vec![Vec::new(); maxdim];
        for f in charts.keys() {
            by_dim[f.len() - 1].push(f.clone());
        }
        let nerve = Nerve { indices, faces: by_dim, charts, rest };
        nerve.check_functorial()?;
        Ok(nerve)
    }

    fn check_functorial(&self) -> Result<(), NerveError> {
        for f in self.charts.keys() {
            for m in subfaces(f) {
                for s in subfaces(&m) {
                    let lhs = self.rest[&(s.clone(), m.clone())].then(&self.rest[&(m.clone(), f.clone())]);
                    if lhs.images() != self.rest[&(s.clone(), f.clone())].images() {
                        return Err(NerveError::Functoriality {
                            sub: self.render_face(&s),
                            mid: self.render_face(&m),
                            face: self.render_face(f),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Every subset of the index set, all with the same chart and identity
    /// restrictions.
    pub fn full(names: &[&str], chart: &Chart) -> Nerve {
        let k = names.len();
        let mut faces = Vec::new();
        for mask in 1..(1u32 << k) {
            faces.push(((0..k).filter(|i| mask & (1 << i) != 0).collect::<Face>(), chart.clone()));
        }
        Nerve::new(names.iter().map(|s| s.to_string()).collect(), faces, vec![]).expect("full simplex is valid")
    }

    /// Closure of the given maximal faces, all with the same chart.
    pub fn from_complex(names: &[&str], maximal: &[Face], chart: &Chart) -> Result<Nerve, NerveError> {
        let mut all: BTreeSet<Face> = BTreeSet::new();
        for f in maximal {
            let mut g = f.clone();
            g.sort();
            all.insert(g.clone());
            for s in subfaces(&g) {
                all.insert(s);
            }
        }
        Nerve::new(names.iter().map(|s| s.to_string()).collect(), all.into_iter().map(|f| (f, chart.clone())).collect(), vec![])
    }

    /// Boundary of the octahedron: six charts `±x, ±y, ±z` (ordered
    /// `x+, x-, y+, y-, z+, z-`), eight triangles.
    pub fn octahedron(chart: &Chart) -> Nerve {
        let mut tris = Vec::new();
        for a in [0, 1] {
            for b in [2, 3] {
                for c in [4, 5] {
                    tris.push(vec![a, b, c]);
                }
            }
        }
        Nerve::from_complex(&["x+", "x-", "y+", "y-", "z+", "z-"], &tris, chart).expect("octahedron is valid")
    }

    pub fn indices(&self) -> &[String] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Top dimension of a face.
    pub fn dim(&self) -> usize {
        self.faces.len().saturating_sub(1)
    }

    /// Nondegenerate faces of dimension `p`.
    pub fn faces(&self, p: usize) -> &[Face] {
        self.faces.get(p).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn all_faces(&self) -> impl Iterator<Item = &Face> {
        self.charts.keys()
    }

    pub fn contains(&self, f: &[usize]) -> bool {
        self.charts.contains_key(f)
    }

    pub fn chart(&self, f: &[usize]) -> &Chart {
        &self.charts[f]
    }

    /// Restriction from a subface to a face (identity when equal).
    pub fn restriction(&self, sub: &[usize], face: &[usize]) -> ChartHom {
        if sub == face {
            return ChartHom::identity(&self.charts[face]);
        }
        self.rest[&(sub.to_vec(), face.to_vec())].clone()
    }

    pub fn render_face(&self, f: &[usize]) -> String {
        f.iter().map(|i| self.indices[*i].as_str()).collect::<Vec<_>>().join(",")
    }

    pub fn parse_face(&self, s: &str) -> Result<Face, NerveError> {
        let mut f = Vec::new();
        for part in s.split(',') {
            let p = part.trim();
            match self.indices.iter().position(|x| x == p) {
                Some(i) => f.push(i),
                None => return Err(NerveError::BadFace(format!("unknown index {}", p))),
            }
        }
        Ok(f)
    }

    /// Euler characteristic of the complex.
    pub fn euler_characteristic(&self) -> i64 {
        self.faces.iter().enumerate().map(|(p, fs)| if p % 2 == 0 { fs.len() as i64 } else { -(fs.len() as i64) }).sum()
    }

    pub fn to_spec(&self) -> NerveSpec {
        let mut algebras = BTreeMap::new();
        for (f, c) in &self.charts {
            algebras.insert(self.render_face(f), AlgebraSpec::from_chart(c));
        }
        let mut restrictions = BTreeMap::new();
        for ((s, f), h) in &self.rest {
            if s.len() + 1 == f.len() && !h.is_identity() {
                restrictions.insert(
                    format!("{} -> {}", self.render_face(s), self.render_face(f)),
                    h.images().iter().map(|p| p.render()).collect(),
                );
            }
        }
        NerveSpec {
            schema: 1,
            indices: self.indices.clone(),
            faces: Some(self.charts.keys().map(|f| f.iter().map(|i| self.indices[*i].clone()).collect()).collect()),
            algebra: None,
            algebras,
            restrictions,
        }
    }
}

/// One chart algebra in a nerve file: variables and denominators.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AlgebraSpec {
    pub vars: Vec<String>,
    #[serde(default)]
    pub denoms: Vec<String>,
}

impl AlgebraSpec {
    pub fn from_chart(c: &ChartData) -> Self {
        AlgebraSpec { vars: c.vars.clone(), denoms: c.denoms.iter().map(|d| d.render(&c.vars)).collect() }
    }

    pub fn to_chart(&self) -> Result<Chart, NerveError> {
        let vars: Vec<&str> = self.vars.iter().map(|s| s.as_str()).collect();
        let poly_chart = ChartData::polynomial(&vars);
        let mut denoms: Vec<Poly> = Vec::new();
        for d in &self.denoms {
            let p = parse_expr(&poly_chart, d).map_err(|e| NerveError::Syntax(format!("denominator {}: {}", d, e)))?;
            match p.as_poly() {
                Some(q) => denoms.push(q.clone()),
                None => return Err(NerveError::Syntax(format!("denominator {} is not a polynomial", d))),
            }
        }
        Ok(ChartData::localized(&vars, denoms))
    }
}

/// Nerve file: indices, faces (all subsets when absent), per-face algebras
/// (falling back to `algebra`), and restriction images keyed `"U0 -> U0,U1"`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NerveSpec {
    pub schema: u32,
    pub indices: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faces: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraSpec>,
    #[serde(default)]
    pub algebras: BTreeMap<String, AlgebraSpec>,
    #[serde(default)]
    pub restrictions: BTreeMap<String, Vec<String>>,
}

impl NerveSpec {
    pub fn build(&self) -> Result<Nerve, NerveError> {
        if self.schema != 1 {
            return Err(NerveError::Syntax(format!("unsupported schema {}", self.schema)));
        }
        let k = self.indices.len();
        let pos = |s: &str| -> Result<usize, NerveError> {
            self.indices.iter().position(|x| x == s.trim()).ok_or_else(|| NerveError::BadFace(format!("unknown index {}", s)))
        };
        let parse_face = |s: &str| -> Result<Face, NerveError> {
            let mut f: Face = s.split(',').map(pos).collect::<Result<_, _>>()?;
            f.sort();
            Ok(f)
        };
        let faces: Vec<Face> = match &self.faces {
            Some(fs) => {
                let mut all: BTreeSet<Face> = BTreeSet::new();
                for f in fs {
                    let mut g: Face = f.iter().map(|s| pos(s)).collect::<Result<_, _>>()?;
                    g.sort();
                    for s in subfaces(&g) {
                        all.insert(s);
                    }
                    all.insert(g);
                }
                all.into_iter().collect()
            }
            None => (1..(1u32 << k)).map(|mask| (0..k).filter(|i| mask & (1 << i) != 0).collect()).collect(),
        };
        let default = match &self.algebra {
            Some(a) => Some(a.to_chart()?),
            None => None,
        };
        let mut named: BTreeMap<Face, Chart> = BTreeMap::new();
        for (key, a) in &self.algebras {
            named.insert(parse_face(key)?, a.to_chart()?);
        }
        let mut with_charts = Vec::new();
        for f in faces {
            let c = match named.remove(&f) {
                Some(c) => c,
                None => match &default {
                    Some(c) => c.clone(),
                    None => {
                        return Err(NerveError::BadFace(format!(
                            "no algebra for face {}",
                            f.iter().map(|i| self.indices[*i].clone()).collect::<Vec<_>>().join(",")
                        )));
                    }
                },
            };
            with_charts.push((f, c));
        }
        if let Some((f, _)) = named.into_iter().next() {
            return Err(NerveError::BadFace(format!("algebra given for a face not in the nerve: {:?}", f)));
        }
        let charts: BTreeMap<Face, Chart> = with_charts.iter().cloned().collect();
        let mut restrictions = Vec::new();
        for (key, images) in &self.restrictions {
            let Some((a, b)) = key.split_once("->") else {
                return Err(NerveError::Syntax(format!("restriction key {} must read 'sub -> face'", key)));
            };
            let (s, f) = (parse_face(a)?, parse_face(b)?);
            let (Some(cs), Some(cf)) = (charts.get(&s), charts.get(&f)) else {
                return Err(NerveError::BadFace(format!("restriction {} between unknown faces", key)));
            };
            let imgs = images
                .iter()
                .map(|e| parse_expr(cf, e).map_err(|err| NerveError::Syntax(format!("{}: {}", key, err))))
                .collect::<Result<Vec<_>, _>>()?;
            let h = ChartHom::new(cs, cf, imgs).map_err(|e| NerveError::BadRestriction(format!("{}: {}", key, e)))?;
            restrictions.push((s, f, h));
        }
        Nerve::new(self.indices.clone(), with_charts, restrictions)
    }
}

/// Order-preserving map of index sets `K′ → K` with restriction maps
/// realizing `U′_k ⊂ U_{ρ(k)}` on each face of the finer nerve.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub fine: NerveRef,
    pub coarse: NerveRef,
    pub map: Vec<usize>,
    /// For each face `σ′` of the fine nerve, the map from the chart of
    /// `dedup(ρ(σ′))` to the chart of `σ′`.
    pub homs: BTreeMap<Face, ChartHom>,
}

impl Refinement {
    /// `homs` missing for a face are taken by variable name.
    pub fn new(
        fine: &NerveRef,
        coarse: &NerveRef,
        map: Vec<usize>,
        mut homs: BTreeMap<Face, ChartHom>,
    ) -> Result<Refinement, NerveError> {
        if map.len() != fine.len() || map.windows(2).any(|w| w[0] > w[1]) || map.iter().any(|&k| k >= coarse.len()) {
            return Err(NerveError::NotOrderPreserving);
        }
        for f in fine.all_faces() {
            let img = dedup(&f.iter().map(|i| map[*i]).collect::<Vec<_>>());
            if !coarse.contains(&img) {
                return Err(NerveError::BadFace(format!("image of {} is not a face", fine.render_face(f))));
            }
            if !homs.contains_key(f) {
                let h = ChartHom::by_name(coarse.chart(&img), fine.chart(f))
                    .map_err(|e| NerveError::BadRestriction(format!("{}: {}", fine.render_face(f), e)))?;
                homs.insert(f.clone(), h);
            }
        }
        Ok(Refinement { fine: fine.clone(), coarse: coarse.clone(), map, homs })
    }

    pub fn identity(n: &NerveRef) -> Refinement {
        Refinement::new(n, n, (0..n.len()).collect(), BTreeMap::new()).expect("identity refinement")
    }

    /// Image of a fine face as a weakly increasing coarse tuple.
    pub fn image(&self, f: &[usize]) -> Vec<usize> {
        f.iter().map(|i| self.map[*i]).collect()
    }

    /// `self` followed by `other` (`fine → mid → coarse`).
    pub fn then(&self, other: &Refinement) -> Refinement {
        assert!(Arc::ptr_eq(&self.coarse, &other.fine) || self.coarse.indices == other.fine.indices);
        let map: Vec<usize> = self.map.iter().map(|k| other.map[*k]).collect();
        let mut homs = BTreeMap::new();
        for f in self.fine.all_faces() {
            let mid = dedup(&self.image(f));
            let h = other.homs[&mid].then(&self.homs[f]);
            homs.insert(f.clone(), h);
        }
        Refinement { fine: self.fine.clone(), coarse: other.coarse.clone(), map, homs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(src: &str) -> NerveSpec {
        serde_json::from_str(src).unwrap()
    }

    #[test]
    fn two_chart_line() {
        let n = spec(
            r#"{ "schema": 1, "indices": ["U0", "U1"],
                 "algebras": { "U0": {"vars": ["x"]}, "U1": {"vars": ["y"]},
                               "U0,U1": {"vars": ["y"], "denoms": ["y"]} },
                 "restrictions": { "U0 -> U0,U1": ["1/y"] } }"#,
        )
        .build()
        .unwrap();
        assert_eq!(n.faces(1).len(), 1);
        let h = n.restriction(&[0], &[0, 1]);
        assert_eq!(h.images()[0].render(), "1/y");
        assert_eq!(n.restriction(&[1], &[0, 1]).images()[0].render(), "y");
        // round trip through the file format
        let again = n.to_spec().build().unwrap();
        assert_eq!(again.to_spec(), n.to_spec());
    }

    #[test]
    fn octahedron_combinatorics() {
        let n = Nerve::octahedron(&ChartData::polynomial(&[]));
        assert_eq!(n.dim(), 2);
        assert!(!n.contains(&[0, 1]));
        assert!(n.contains(&[0, 2, 4]));
    }

    #[test]
    fn broken_composition_is_rejected() {
        let err = spec(
            r#"{ "schema": 1, "indices": ["A", "B", "C"], "algebra": {"vars": ["x"]},
                 "restrictions": { "A -> A,B,C": ["2*x"] } }"#,
        )
        .build()
        .unwrap_err();
        match err {
            NerveError::Functoriality { sub, face, .. } => {
                assert_eq!(sub, "A");
                assert_eq!(face, "A,B,C");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn missing_algebra_and_bad_schema() {
        assert!(spec(r#"{ "schema": 2, "indices": ["A"], "algebra": {"vars": []} }"#).build().is_err());
        assert!(spec(r#"{ "schema": 1, "indices": ["A", "B"], "algebras": {"A": {"vars": []}} }"#).build().is_err());
    }
}
