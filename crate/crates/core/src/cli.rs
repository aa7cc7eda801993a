//! Run configuration, input loading and report assembly shared by the
//! `koszul` binary and the C API.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::CohomologyReport;
use crate::duality::{verify_duality, DualityError, DualityReport};
use crate::equivariant::{cartan_model, invariant_subcomplex};
use crate::kg::{
    exterior_model, invariant_rep_module, polynomial_forms_module, sym_power_rep, tensor_module, trivial_module,
    validate_kg, KgError, KgModule, KgReport, ModuleFile,
};
use crate::lie::{LieAlgebra, LieError};
use crate::linalg::Matrix;
use crate::monomial::LambdaMonomial;
use crate::transgression::{distinguished_transgression, primitive_basis, TransgressionReport};
use crate::weil::{weil_model, weil_structure_maps, StructureMapsReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Validate,
    Cohomology,
    WeilCheck,
    Transgress,
    Duality,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    #[default]
    Plain,
    Invariant,
    Cartan,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    /// Builtin name (`su2`, `sl2`, `su2xsu2`, `abelian:n`) or a JSON file.
    pub algebra: String,
    /// `trivial`, `exterior`, `forms:<coadjoint|adjoint>:<d>`,
    /// `sym-invariants:<a>` or `file:PATH`, joined by `*` for tensor products.
    pub module: String,
    pub max_degree: i32,
    pub format: Format,
    #[serde(default)]
    pub model: Model,
    #[serde(default)]
    pub corrupt_transgression: bool,
}

impl RunConfig {
    pub fn new(command: Command, algebra: &str, module: &str, max_degree: i32) -> Self {
        Self {
            command,
            algebra: algebra.into(),
            module: module.into(),
            max_degree,
            format: Format::Json,
            model: Model::Plain,
            corrupt_transgression: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("{0}")]
    Math(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Math(_) => 1,
        }
    }
}

impl From<LieError> for CliError {
    fn from(e: LieError) -> Self {
        match e {
            LieError::Parse(_) | LieError::BadIndex { .. } | LieError::BadRational(_) | LieError::UnknownBuiltin(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Math(e.to_string()),
        }
    }
}

impl From<KgError> for CliError {
    fn from(e: KgError) -> Self {
        match e {
            KgError::Lie(l) => l.into(),
            KgError::File(_) | KgError::Shape(_) => CliError::Input(e.to_string()),
            _ => CliError::Math(e.to_string()),
        }
    }
}

impl From<DualityError> for CliError {
    fn from(e: DualityError) -> Self {
        match e {
            DualityError::Kg(k) => k.into(),
            DualityError::BadDegree => CliError::Input(e.to_string()),
            _ => CliError::Math(e.to_string()),
        }
    }
}

fn math<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Math(e.to_string())
}

/// Builtin name or path to an algebra file. Reductivity is certified.
pub fn load_algebra(spec: &str) -> Result<Arc<LieAlgebra>, CliError> {
    let g = if LieAlgebra::builtin_names().contains(&spec) || spec.starts_with("abelian:") {
        LieAlgebra::builtin(spec)?
    } else if Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec).map_err(|e| CliError::Input(format!("{spec}: {e}")))?;
        LieAlgebra::from_json(&text)?
    } else {
        return Err(CliError::Input(format!("unknown algebra {spec:?}: not a builtin and no such file")));
    };
    g.certify_reductive()?;
    Ok(Arc::new(g))
}

fn load_factor(g: &Arc<LieAlgebra>, spec: &str) -> Result<KgModule, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["trivial"] => Ok(trivial_module(g)),
        ["exterior"] => Ok(exterior_model(g)),
        ["forms", action, d] => {
            let slice: usize = d.parse().map_err(|_| CliError::Input(format!("bad slice degree {d:?}")))?;
            let mats: Vec<Matrix> = match *action {
                "coadjoint" => g.coad_matrices(),
                "adjoint" => g.ad_matrices(),
                _ => return Err(CliError::Input(format!("unknown action {action:?}"))),
            };
            Ok(polynomial_forms_module(g, &mats, slice)?)
        }
        ["sym-invariants", a] => {
            let a: usize = a.parse().map_err(|_| CliError::Input(format!("bad symmetric power {a:?}")))?;
            let (rep, labels) = sym_power_rep(g, a);
            Ok(invariant_rep_module(g, &rep, &labels, 2 * a as i32)?)
        }
        ["file", ..] => {
            let path = &spec["file:".len()..];
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
            Ok(ModuleFile::from_json(&text)?.load(g)?)
        }
        _ => Err(CliError::Input(format!("unknown module {spec:?}"))),
    }
}

/// Parses a module spec; factors joined by `*` are tensored left to right.
pub fn load_module(g: &Arc<LieAlgebra>, spec: &str) -> Result<KgModule, CliError> {
    let mut factors = spec.split('*').map(str::trim);
    let first = factors.next().filter(|s| !s.is_empty()).ok_or_else(|| CliError::Input("empty module".into()))?;
    let mut m = load_factor(g, first)?;
    for f in factors {
        m = tensor_module(&m, &load_factor(g, f)?, None)?;
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub algebra: String,
    pub dim: usize,
    pub center_dim: usize,
    pub derived_dim: usize,
    pub module: KgReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelCohomology {
    pub model: Model,
    pub dims: Vec<usize>,
    pub cohomology: CohomologyReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaurerCartan {
    pub xi: String,
    /// `d_W(1⊗ξ) - 1⊗d_Λξ - ξ⊗1`.
    pub residual: String,
    pub zero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeilCheckReport {
    pub maurer_cartan: Vec<MaurerCartan>,
    pub dims: Vec<usize>,
    pub betti: BTreeMap<i32, usize>,
    pub acyclic: bool,
    pub structure_maps: StructureMapsReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "body", rename_all = "kebab-case")]
pub enum Report {
    Validate(ValidateReport),
    Cohomology(ModelCohomology),
    WeilCheck(WeilCheckReport),
    Transgress(TransgressionReport),
    Duality(DualityReport),
}

/// Output of one run, with the version and configuration that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub pass: bool,
    pub report: Report,
}

impl Envelope {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

pub fn weil_check(g: &Arc<LieAlgebra>, n: i32) -> WeilCheckReport {
    let w = weil_model(g, n);
    let wm = w.module();
    let ext = exterior_model(g);
    let names = g.dual_labels();
    let maurer_cartan = (0..g.dim())
        .map(|k| {
            let lam = LambdaMonomial::generator(k);
            let xi = crate::linalg::SparseVec::unit(g.dim(), k);
            let one_xi = w.lambda_element(1, &xi);
            let dlam = ext.d().apply(1, &xi);
            let residual = &(&wm.d().apply(1, &one_xi) - &w.lambda_element(2, &dlam)) - &w.sym_element(1, &xi);
            MaurerCartan { xi: lam.label(&names), residual: w.format(2, &residual), zero: residual.is_zero() }
        })
        .collect();
    let h = wm.complex().cohomology(n).expect("Weil model is exact below its top");
    let acyclic = h.betti.iter().all(|(&d, &b)| b == usize::from(d == 0));
    WeilCheckReport {
        maurer_cartan,
        dims: w.dims().as_vec(),
        betti: h.betti,
        acyclic,
        structure_maps: weil_structure_maps(&w),
    }
}

fn cohomology(cfg: &RunConfig, m: &KgModule) -> Result<ModelCohomology, CliError> {
    let n = cfg.max_degree;
    let c = match cfg.model {
        Model::Plain => m.complex().clone(),
        Model::Invariant => invariant_subcomplex(m).map_err(math)?.complex().clone(),
        Model::Cartan => cartan_model(m, n).map_err(math)?.complex().clone(),
    };
    let cohomology = c.cohomology(n.min(c.hi() + 1).max(c.lo())).map_err(math)?;
    Ok(ModelCohomology { model: cfg.model, dims: c.dims().as_vec(), cohomology })
}

/// Runs one command. Input problems are errors; mathematical failures are
/// reported with `pass = false`.
pub fn run(cfg: &RunConfig) -> Result<Envelope, CliError> {
    if cfg.max_degree < 1 {
        return Err(CliError::Input("max degree must be at least 1".into()));
    }
    let g = load_algebra(&cfg.algebra)?;
    let (report, pass) = match cfg.command {
        Command::Validate => {
            let d = g.certify_reductive()?;
            let m = load_module(&g, &cfg.module)?;
            let r = validate_kg(&m);
            let pass = r.pass;
            let v = ValidateReport {
                algebra: g.name().to_string(),
                dim: g.dim(),
                center_dim: d.center.len(),
                derived_dim: d.derived.len(),
                module: r,
            };
            (Report::Validate(v), pass)
        }
        Command::Cohomology => {
            let m = load_module(&g, &cfg.module)?;
            (Report::Cohomology(cohomology(cfg, &m)?), true)
        }
        Command::WeilCheck => {
            let r = weil_check(&g, cfg.max_degree);
            let s = &r.structure_maps;
            let pass = r.acyclic
                && r.maurer_cartan.iter().all(|x| x.zero)
                && s.inclusion.pass
                && s.restriction.pass
                && s.inclusion_commutes_with_i
                && s.restriction_commutes_with_i;
            (Report::WeilCheck(r), pass)
        }
        Command::Transgress => {
            let p = primitive_basis(&g).map_err(math)?;
            let t = distinguished_transgression(&p, cfg.corrupt_transgression).map_err(math)?;
            let r = t.report((cfg.max_degree.max(0) / 2) as usize);
            let pass = r.pass;
            (Report::Transgress(r), pass)
        }
        Command::Duality => {
            let m = load_module(&g, &cfg.module)?;
            let r = verify_duality(&m, cfg.max_degree, cfg.corrupt_transgression)?;
            let pass = r.pass;
            (Report::Duality(r), pass)
        }
    };
    Ok(Envelope { tool: "koszul".into(), version: VERSION.into(), config: cfg.clone(), pass, report })
}

fn betti_line(b: &BTreeMap<i32, usize>) -> String {
    b.iter().map(|(d, n)| format!("{d}:{n}")).collect::<Vec<_>>().join(" ")
}

/// Human-readable summary of a report.
pub fn render_text(env: &Envelope) -> String {
    let mut out = format!(
        "koszul {} {:?} algebra={} module={} N={}\n",
        env.version, env.config.command, env.config.algebra, env.config.module, env.config.max_degree
    );
    match &env.report {
        Report::Validate(v) => {
            out += &format!("{} dim={} center={} derived={}\n", v.algebra, v.dim, v.center_dim, v.derived_dim);
            for c in &v.module.checks {
                out += &format!("  {:<28} {}\n", c.identity, if c.pass { "ok" } else { "FAIL" });
                if let Some(w) = &c.witness {
                    out += &format!("    degree {} {}: {}\n", w.degree, w.basis_label, w.defect);
                }
            }
        }
        Report::Cohomology(c) => {
            out += &format!("model {:?} dims {:?}\n", c.model, c.dims);
            out += &format!("betti {}\n", betti_line(&c.cohomology.betti));
            for (d, reps) in &c.cohomology.representatives {
                for r in reps {
                    out += &format!("  H^{d}: {r}\n");
                }
            }
            if !c.cohomology.uncertified.is_empty() {
                out += &format!("uncertified {}\n", betti_line(&c.cohomology.uncertified));
            }
        }
        Report::WeilCheck(w) => {
            for m in &w.maurer_cartan {
                out += &format!("  d(1⊗{}) - 1⊗dΛ - {}⊗1 = {}\n", m.xi, m.xi, m.residual);
            }
            out += &format!("betti {}\nacyclic {}\n", betti_line(&w.betti), w.acyclic);
        }
        Report::Transgress(t) => {
            out += &format!("primitives {:?} in degrees {:?}\n", t.primitives.primitives, t.primitives.primitive_degrees);
            for c in &t.checks {
                out += &format!("  ξ = {}\n    ω = {}\n    ξ̃ = {}\n", c.xi, c.omega, c.xi_tilde);
            }
        }
        Report::Duality(d) => {
            out += &format!("betti h((M)_g)   {}\n", betti_line(&d.betti_h));
            out += &format!("betti (W⊗M)^g    {}\n", betti_line(&d.betti_target));
            out += &format!("betti (M)^g      {}\n", betti_line(&d.betti_invariant));
            out += &format!("psi chain map {} quasi-iso {}\n", d.psi.chain_map.pass, d.psi.pass);
            if let Some(w) = &d.psi.chain_map.witness {
                out += &format!("  defect at degree {} on {}: {}\n", w.degree, w.basis_label, w.defect);
            }
            out += &format!("inclusion chain map {} quasi-iso {}\n", d.inclusion.chain_map.pass, d.inclusion.pass);
        }
    }
    out += if env.pass { "PASS\n" } else { "FAIL\n" };
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_round_trips() {
        let cfg = RunConfig::new(Command::Transgress, "su2", "trivial", 8);
        let env = run(&cfg).unwrap();
        assert!(env.pass);
        let back: Envelope = serde_json::from_str(&env.to_json()).unwrap();
        assert_eq!(back, env);
    }

    #[test]
    fn module_specs() {
        let g = load_algebra("su2").unwrap();
        assert_eq!(load_module(&g, "exterior*trivial").unwrap().dims().as_vec(), vec![1, 3, 3, 1]);
        assert_eq!(load_module(&g, "sym-invariants:2").unwrap().dims().as_vec(), vec![1]);
        assert!(matches!(load_module(&g, "bogus"), Err(CliError::Input(_))));
        assert!(matches!(load_algebra("nope"), Err(CliError::Input(_))));
    }

    #[test]
    fn weil_check_su2() {
        let g = load_algebra("su2").unwrap();
        let r = weil_check(&g, 6);
        assert!(r.acyclic && r.maurer_cartan.iter().all(|m| m.zero));
    }
}
