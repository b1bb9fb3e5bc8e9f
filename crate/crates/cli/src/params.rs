use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use serde::Serialize;
use serde_json::Value;

use quadvp::dynamics::GenericMapParams;
use quadvp::normalform::case_i_from_params;

/// Parameters of the generic map, from flags or from a normal-form file.
#[derive(Args, Debug, Clone, Serialize)]
pub struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Normal-form file written by `normal-form`; its generic parameters are
    /// used when present, else its case I parameters.
    #[arg(long)]
    #[serde(rename = "params_file")]
    pub params: Option<PathBuf>,
}

impl ParamArgs {
    pub fn resolve(&self) -> Result<GenericMapParams> {
        let flags = [
            ("alpha", self.alpha),
            ("tau", self.tau),
            ("sigma", self.sigma),
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
        ];
        let given: Vec<&str> = flags.iter().filter(|f| f.1.is_some()).map(|f| f.0).collect();
        if let Some(path) = &self.params {
            if !given.is_empty() {
                bail!(
                    "conflicting parameter sources: --params and --{}",
                    given.join(", --")
                );
            }
            return from_file(path);
        }
        let missing: Vec<&str> = flags.iter().filter(|f| f.1.is_none()).map(|f| f.0).collect();
        if !missing.is_empty() {
            bail!("missing parameters: --{} (or pass --params)", missing.join(", --"));
        }
        let v = |i: usize| flags[i].1.expect("checked");
        Ok(GenericMapParams::new(v(0), v(1), v(2), v(3), v(4), v(5)))
    }
}

fn from_file(path: &PathBuf) -> Result<GenericMapParams> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let num = |v: &Value, k: &str| -> Result<f64> {
        v.get(k)
            .and_then(Value::as_f64)
            .ok_or_else(|| anyhow!("{}: missing number {k}", path.display()))
    };
    if let Some(g) = doc.get("generic").filter(|g| !g.is_null()) {
        return Ok(GenericMapParams::new(
            num(g, "alpha")?,
            num(g, "tau")?,
            0.0,
            num(g, "a")?,
            num(g, "b")?,
            num(g, "c")?,
        ));
    }
    match doc.get("case").and_then(Value::as_str) {
        Some("I") => {}
        Some(c) => bail!("{}: case {c} has no generic parameters", path.display()),
        None => bail!("{}: not a normal-form file", path.display()),
    }
    let params = serde_json::from_value(doc.get("params").cloned().unwrap_or(Value::Null))
        .with_context(|| format!("{}: bad params", path.display()))?;
    Ok(GenericMapParams::from_normal_form(&case_i_from_params(&params)?)?)
}
