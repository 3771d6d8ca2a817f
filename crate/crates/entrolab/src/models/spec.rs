//! JSON description of a model instance.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::irw::Potential;
use super::zero_range::SiteRates;
use super::{bernoulli_laplace, build_irw, curie_weiss, cycle_graph, hardcore, ising, zero_range, ModelInstance};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Irw,
    CurieWeiss,
    Ising,
    Hardcore,
    BernoulliLaplace,
    ZeroRange,
    /// Generic spin system built from a Hamiltonian callable.
    Glauber,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    #[serde(default)]
    pub params: Value,
    /// Box size `n` for lattice families.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
}

fn default_lambda() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IrwParams {
    d: usize,
    #[serde(default = "default_lambda")]
    lambda: f64,
    #[serde(default)]
    v_plus: Option<Potential>,
    /// Defaults to Poisson departures at rate `λ`.
    #[serde(default)]
    v_minus: Option<Potential>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurieWeissParams {
    n: usize,
    beta: f64,
}

/// Either an adjacency list or a named graph.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum GraphSpec {
    Adjacency(Vec<Vec<usize>>),
    Named(NamedGraph),
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum NamedGraph {
    Cycle { n: usize },
    Path { n: usize },
}

impl GraphSpec {
    fn adjacency(self) -> Result<Vec<Vec<usize>>> {
        match self {
            GraphSpec::Adjacency(a) => Ok(a),
            GraphSpec::Named(NamedGraph::Cycle { n }) if n >= 3 => Ok(cycle_graph(n)),
            GraphSpec::Named(NamedGraph::Path { n }) if n >= 2 => Ok((0..n)
                .map(|x| [x.checked_sub(1), (x + 1 < n).then_some(x + 1)].into_iter().flatten().collect())
                .collect()),
            GraphSpec::Named(g) => Err(Error::InvalidParams(format!("graph {g:?} too small"))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IsingParams {
    graph: GraphSpec,
    d: usize,
    beta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HardcoreParams {
    graph: GraphSpec,
    rho: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct BlParams {
    L: usize,
    N: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct ZrParams {
    L: usize,
    N: usize,
    #[serde(default = "linear_rates")]
    rates: SiteRates,
}

fn linear_rates() -> SiteRates {
    SiteRates::Linear
}

fn parse<T: serde::de::DeserializeOwned>(family: Family, v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::InvalidParams(format!("{family:?} params: {e}")))
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<ModelSpec> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn build(&self) -> Result<ModelInstance> {
        let f = self.family;
        match f {
            Family::Irw => {
                let p: IrwParams = parse(f, &self.params)?;
                let n = self.truncation.ok_or_else(|| Error::InvalidParams("irw needs a truncation box size".into()))?;
                if !(p.lambda > 0.0 && p.lambda.is_finite()) {
                    return Err(Error::InvalidParams(format!("lambda must be > 0, got {}", p.lambda)));
                }
                let v_plus = p.v_plus.unwrap_or(Potential::Zero);
                let v_minus = p.v_minus.unwrap_or(Potential::Poisson { lambda: p.lambda });
                build_irw(&v_plus, &v_minus, p.d, n)
            }
            Family::CurieWeiss => {
                let p: CurieWeissParams = parse(f, &self.params)?;
                Ok(curie_weiss(p.n, p.beta)?.0)
            }
            Family::Ising => {
                let p: IsingParams = parse(f, &self.params)?;
                ising(&p.graph.adjacency()?, p.d, p.beta)
            }
            Family::Hardcore => {
                let p: HardcoreParams = parse(f, &self.params)?;
                hardcore(&p.graph.adjacency()?, p.rho)
            }
            Family::BernoulliLaplace => {
                let p: BlParams = parse(f, &self.params)?;
                bernoulli_laplace(p.L, p.N)
            }
            Family::ZeroRange => {
                let p: ZrParams = parse(f, &self.params)?;
                zero_range(p.L, p.N, &p.rates)
            }
            Family::Glauber => Err(Error::InvalidParams(
                "generic glauber models take a Hamiltonian callable and cannot be built from JSON".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(text: &str) -> Result<ModelInstance> {
        ModelSpec::from_json(text)?.build()
    }

    #[test]
    fn parses_every_family() {
        let irw = build(r#"{"family":"irw","params":{"d":2,"v_plus":{"kind":"quadratic","beta":0.5}},"truncation":4}"#).unwrap();
        assert_eq!(irw.generator.n_states(), 25);
        let cw = build(r#"{"family":"curie_weiss","params":{"n":4,"beta":0.2}}"#).unwrap();
        assert_eq!(cw.generator.n_states(), 16);
        let is = build(r#"{"family":"ising","params":{"graph":{"kind":"cycle","n":4},"d":1,"beta":0.05}}"#).unwrap();
        assert_eq!(is.generator.n_states(), 16);
        let hc = build(r#"{"family":"hardcore","params":{"graph":[[1],[0]],"rho":0.5}}"#).unwrap();
        assert_eq!(hc.generator.n_states(), 3);
        let bl = build(r#"{"family":"bernoulli_laplace","params":{"L":4,"N":2}}"#).unwrap();
        assert_eq!(bl.generator.n_states(), 6);
        let zr = build(r#"{"family":"zero_range","params":{"L":3,"N":4}}"#).unwrap();
        assert_eq!(zr.generator.n_states(), 15);
        let path = build(r#"{"family":"hardcore","params":{"graph":{"kind":"path","n":3},"rho":0.3}}"#).unwrap();
        assert_eq!(path.generator.n_states(), 5);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(build(r#"{"family":"irw","params":{"d":2}}"#).is_err());
        assert!(build(r#"{"family":"irw","params":{"d":2,"lambda":-1},"truncation":3}"#).is_err());
        assert!(build(r#"{"family":"bernoulli_laplace","params":{"L":2,"N":2}}"#).is_err());
        assert!(build(r#"{"family":"curie_weiss","params":{"n":4,"beta":0.2,"extra":1}}"#).is_err());
        assert!(build(r#"{"family":"hardcore","params":{"graph":[[1],[]],"rho":0.5}}"#).is_err());
        assert!(build(r#"{"family":"martian","params":{}}"#).is_err());
    }
}
