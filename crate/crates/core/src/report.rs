//! Report envelopes and JSON views of analysis results.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::extractor::{
    Check, IndexStat, LineWitness, PseudorandomCertificate, Relation, SeparatedWitness, Transcript,
};
use crate::hypercube::{Alphabet, Sym, Word};
use crate::process::{ClassificationReport, Target};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Ok,
    Pseudorandom,
    Error,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::Error => 1,
            Outcome::Pseudorandom => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Vec<String>,
    pub parameters: Value,
    pub outcome: Outcome,
    pub results: Value,
    pub transcript: Transcript,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn new(command: Vec<String>, parameters: Value) -> Report {
        Report {
            command,
            parameters,
            outcome: Outcome::Ok,
            results: Value::Null,
            transcript: Transcript::default(),
            seed: None,
            timing_ms: None,
            error: None,
        }
    }

    pub fn fail(mut self, e: &Error) -> Report {
        self.outcome = Outcome::Error;
        self.error = Some(e.to_string());
        self
    }

    /// Re-evaluate the transcript; a stored verdict that no longer matches, or
    /// a failing check on an `ok` report, turns the report into an error.
    pub fn finalize(mut self) -> Report {
        if !self.transcript.recheck() {
            self.outcome = Outcome::Error;
            self.error = Some("transcript verdicts do not match their values".into());
        } else if self.outcome == Outcome::Ok {
            if let Err(e) = self.transcript.require() {
                return self.fail(&e);
            }
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report JSON")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command.join(" ")));
        out.push_str(&format!("outcome: {:?}\n", self.outcome).to_lowercase());
        if let Some(e) = &self.error {
            out.push_str(&format!("error: {e}\n"));
        }
        if let Some(s) = self.seed {
            out.push_str(&format!("seed: {s}\n"));
        }
        if let Value::Object(m) = &self.results {
            for (k, v) in m {
                out.push_str(&format!("{k}: {}\n", compact(v)));
            }
        } else if !self.results.is_null() {
            out.push_str(&format!("results: {}\n", compact(&self.results)));
        }
        for c in &self.transcript.checks {
            out.push_str(&check_line(c));
            out.push('\n');
        }
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn check_line(c: &Check) -> String {
    let rel = match c.relation {
        Relation::Ge => ">=",
        Relation::Le => "<=",
    };
    let at = c.at.as_ref().map(|a| format!(" at {a}")).unwrap_or_default();
    let verdict = if c.holds { "ok" } else { "FAIL" };
    format!("[{verdict}] {}{at}: {} {rel} {}", c.name, c.lhs, c.rhs)
}

fn sym(a: &Alphabet, s: Sym) -> String {
    a.token(s).to_string()
}

fn syms(a: &Alphabet, s: &[Sym]) -> Vec<String> {
    s.iter().map(|&x| sym(a, x)).collect()
}

fn word(a: &Alphabet, w: &Word) -> Vec<String> {
    a.render(w)
}

pub fn target_json(a: &Alphabet, t: &Target) -> Value {
    match t {
        Target::Gamma(g) => json!({ "gamma": syms(a, g) }),
        Target::Type(tau) => json!({
            "type": tau.elements.iter().map(|e| word(a, e)).collect::<Vec<_>>(),
            "dim": tau.dim,
        }),
    }
}

pub fn classification_json(a: &Alphabet, r: &ClassificationReport) -> Value {
    json!({
        "target": target_json(a, &r.target),
        "theta": r.theta,
        "expected": r.expected,
        "min_corr": r.min_corr,
        "max_corr": r.max_corr,
        "deviation": r.max_deviation(),
        "instances": r.instances,
        "label": r.label,
    })
}

fn stats_json(a: &Alphabet, stats: &[IndexStat]) -> Value {
    Value::Array(
        stats.iter().map(|s| json!({ "t": word(a, &s.t), "p_s": s.p_s, "p_d_given_s": s.p_d_given_s })).collect(),
    )
}

pub fn certificate_json(a: &Alphabet, c: &PseudorandomCertificate) -> Value {
    json!({
        "kind": "pseudorandom",
        "params": c.params,
        "theta": c.theta.0,
        "max_deviation": c.max_deviation(),
        "classifications": c.reports.iter().map(|r| classification_json(a, r)).collect::<Vec<_>>(),
    })
}

pub fn line_witness_json(a: &Alphabet, w: &LineWitness) -> Value {
    let beta = sym(a, w.beta);
    let factors: Vec<Value> = w
        .factors
        .iter()
        .map(|(alpha, _)| {
            let al = sym(a, *alpha);
            json!({
                "alpha": al,
                "complemented": Some(*alpha) == w.gamma_sym,
                "recipe": format!("D at t with every {beta} replaced by {al}"),
                "insensitive": w.insensitivity.iter().any(|(x, c)| x == alpha && c.holds),
            })
        })
        .collect();
    json!({
        "kind": "lines",
        "params": w.params,
        "gamma0": syms(a, &w.gamma0),
        "gamma": syms(a, &w.gamma),
        "beta": beta,
        "branch": w.branch,
        "classification": classification_json(a, &w.report),
        "theta": w.theta,
        "factors": factors,
        "padding": syms(a, &w.padding),
        "stats": stats_json(a, &w.stats),
        "s_within_d": w.s_within_d,
        "eta_star_lines": w.eta_star,
    })
}

pub fn separated_witness_json(a: &Alphabet, w: &SeparatedWitness) -> Value {
    let c = &w.construction;
    let factors: Vec<Value> = w
        .factors
        .iter()
        .map(|f| {
            json!({
                "j": f.j + 1,
                "block": f.block + 1,
                "alpha": sym(a, f.alpha),
                "beta": sym(a, f.beta),
                "complemented": f.complemented,
                "recipe": format!("D at T_{}(z)", f.j + 1),
                "substitutions": (0..c.ell())
                    .map(|l| json!({ "block": l + 1, "from": sym(a, c.betas[l]), "to": sym(a, c.symbol(f.j, l)) }))
                    .collect::<Vec<_>>(),
                "insensitive": f.insensitivity.holds,
            })
        })
        .collect();
    let blocks: Vec<Value> = w
        .block_summaries()
        .iter()
        .map(|b| {
            json!({
                "block": b.block + 1,
                "beta": sym(a, b.beta),
                "gamma": syms(a, &b.gamma),
                "factors": b.factors.iter().map(|j| j + 1).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "kind": if w.ell == 1 && c.r.len() == 1 { "onesep" } else { "simplicial" },
        "params": w.params,
        "ell": w.ell,
        "target": w.target.elements.iter().map(|e| word(a, e)).collect::<Vec<_>>(),
        "tuple": w.tuple.iter().map(|t| word(a, t)).collect::<Vec<_>>(),
        "iotas": c.iotas.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "betas": syms(a, &c.betas),
        "r": c.r,
        "v": format!("{:?}", c.v.generator()),
        "branch": w.branch,
        "classification": classification_json(a, &w.report),
        "theta": w.theta,
        "blocks": blocks,
        "trivial_blocks": w.trivial_blocks.iter().map(|l| l + 1).collect::<Vec<_>>(),
        "certified": w.simplicial_certified(),
        "factors": factors,
        "type_preservation": c.fact,
        "stats": stats_json(a, &w.stats),
        "s_within_d": w.s_within_d,
        "eta_star_types": w.eta_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    #[test]
    fn finalize_catches_tampering() {
        let mut r = Report::new(vec!["x".into()], Value::Null);
        r.transcript.ge("a", None, Rational::new(1, 2), Rational::new(1, 3));
        let ok = r.clone().finalize();
        assert_eq!(ok.outcome, Outcome::Ok);
        r.transcript.checks[0].lhs = Rational::new(1, 4);
        let bad = r.finalize();
        assert_eq!(bad.outcome, Outcome::Error);
        let text = ok.to_text();
        assert!(text.contains("[ok] a: 1/2 >= 1/3"));
    }
}
