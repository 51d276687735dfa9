use crate::dgla::{ChartCarrier, Ext, ExtElem};
use crate::polydiff::{star_from_mc, PolyDiff, StarProduct};
use crate::polyvec::{poisson_from_mc, PoissonStructure, Polyvec};

/// A chart carrier whose MC elements define local deformations, with the
/// text syntax for operator keys used in data files.
pub trait DescentCarrier: ChartCarrier {
    type Local: Clone + std::fmt::Debug;

    fn local(ext: &Ext<Self>, beta: &ExtElem<Self::Elem>, cert_degree: u32) -> Result<Self::Local, String>;

    /// A monomial degree on which two composites of gauge actions on
    /// functions (built from the given logarithms) agree only if they are
    /// equal as operators.
    fn action_degree_bound(ext: &Ext<Self>, logs: &[&ExtElem<Self::Elem>]) -> u32;

    /// Parse an operator key (`dx^dy`, or `d[1,0]⊗d[0,1]`) for an element
    /// of degree `deg`; the empty string is the function slot.
    fn parse_op(&self, op: &str, deg: i32) -> Result<Vec<u32>, String>;

    fn render_op(&self, key: &[u32], deg: i32) -> String;
}

impl DescentCarrier for Polyvec {
    type Local = PoissonStructure;

    fn local(ext: &Ext<Self>, beta: &ExtElem<Self::Elem>, _cert_degree: u32) -> Result<PoissonStructure, String> {
        poisson_from_mc(ext, beta).map_err(|e| e.to_string())
    }

    // exp of a vector field is an algebra automorphism, fixed by the
    // coordinates
    fn action_degree_bound(_ext: &Ext<Self>, _logs: &[&ExtElem<Self::Elem>]) -> u32 {
        1
    }

    fn parse_op(&self, op: &str, deg: i32) -> Result<Vec<u32>, String> {
        let op = op.trim();
        let mut key = Vec::new();
        if !op.is_empty() {
            for part in op.split('^') {
                let v = part.trim().strip_prefix('d').ok_or_else(|| format!("bad polyvector factor '{}'", part))?;
                let i = self.chart().vars.iter().position(|w| w == v).ok_or_else(|| format!("unknown variable '{}'", v))?;
                key.push(i as u32);
            }
        }
        if key.len() as i32 != deg + 1 {
            return Err(format!("'{}' has {} factors, degree {} needs {}", op, key.len(), deg, deg + 1));
        }
        Ok(key)
    }

    fn render_op(&self, key: &[u32], _deg: i32) -> String {
        key.iter().map(|&i| format!("d{}", self.chart().vars[i as usize])).collect::<Vec<_>>().join("^")
    }
}

impl DescentCarrier for PolyDiff {
    type Local = StarProduct;

    fn local(ext: &Ext<Self>, beta: &ExtElem<Self::Elem>, cert_degree: u32) -> Result<StarProduct, String> {
        star_from_mc(ext, beta, cert_degree).map(|(s, _)| s).map_err(|e| e.to_string())
    }

    // exp(γ) on functions has order at most (top order) × (order of γ)
    fn action_degree_bound(ext: &Ext<Self>, logs: &[&ExtElem<Self::Elem>]) -> u32 {
        let top = ext.params.top_order();
        let total: u32 = logs.iter().map(|x| x.comps.values().map(|v| ext.base.operator_order(v)).max().unwrap_or(0)).sum();
        (top * total).max(1)
    }

    fn parse_op(&self, op: &str, deg: i32) -> Result<Vec<u32>, String> {
        let n = self.nvars();
        let op = op.trim();
        let mut key = Vec::new();
        let mut slots = 0;
        if !op.is_empty() {
            for part in op.split('⊗').flat_map(|p| p.split("(x)")) {
                let inner = part
                    .trim()
                    .strip_prefix("d[")
                    .and_then(|p| p.strip_suffix(']'))
                    .ok_or_else(|| format!("bad slot '{}', expected d[a,b,..]", part))?;
                let idx: Vec<u32> = if inner.trim().is_empty() {
                    vec![]
                } else {
                    inner.split(',').map(|e| e.trim().parse::<u32>().map_err(|_| format!("bad multi-index '{}'", inner))).collect::<Result<_, _>>()?
                };
                if idx.len() != n {
                    return Err(format!("multi-index '{}' needs {} entries", inner, n));
                }
                if idx.iter().all(|e| *e == 0) {
                    return Err(format!("slot '{}' is not normalized", part));
                }
                key.extend(idx);
                slots += 1;
            }
        }
        if slots != deg + 1 {
            return Err(format!("'{}' has {} slots, degree {} needs {}", op, slots, deg, deg + 1));
        }
        Ok(key)
    }

    fn render_op(&self, key: &[u32], deg: i32) -> String {
        let n = self.nvars();
        if deg < 0 {
            return String::new();
        }
        if n == 0 {
            return vec!["d[]"; (deg + 1) as usize].join("⊗");
        }
        key.chunks(n)
            .map(|c| format!("d[{}]", c.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")))
            .collect::<Vec<_>>()
            .join("⊗")
    }
}
