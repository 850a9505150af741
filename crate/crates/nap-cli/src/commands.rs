//! Command implementations. Each returns the process exit code (0 or 1) or
//! a [`CliError`] for the error exits.

use std::cmp::Ordering;
use std::path::Path;

use serde_json::json;

use nap_core::bridge::{self, nap_to_popper, SnapshotRow, SnapshotStudy};
use nap_core::events::{Event, NapModel};
use nap_core::field::{decimal_string, render_value, FieldValue, Rational};
use nap_core::lexi::{expand, lex_divergence, valuation, Rank};
use nap_core::popper::{AxiomReport, PopperAxiom, PopperTable};

use crate::model_file::{to_file, save, LoadedModel, ModelData};
use crate::{CliError, Format, TargetKind};

pub fn check(path: &Path, format: Format, max_atoms: Option<usize>) -> Result<u8, CliError> {
    let model = LoadedModel::load(path)?;
    match &model.data {
        ModelData::Nap(m) => {
            match format {
                Format::Text => println!(
                    "valid nap model: {} outcomes, max rank {}",
                    m.space().len(),
                    m.max_rank()
                ),
                Format::Json => println!(
                    "{}",
                    json!({
                        "kind": "nap",
                        "passed": true,
                        "outcomes": m.space().len(),
                        "max_rank": m.max_rank(),
                    })
                ),
            }
            Ok(0)
        }
        ModelData::Popper(t) => {
            let report = match max_atoms {
                Some(limit) => t.check_axioms_with_limit(limit),
                None => t.check_axioms(),
            }?;
            let passed = report.passed() && report.regular();
            match format {
                Format::Text => {
                    print!("{}", report);
                    println!("table: {}", if passed { "pass" } else { "FAIL" });
                }
                Format::Json => println!("{}", check_json(t, &report)),
            }
            Ok(if passed { 0 } else { 1 })
        }
    }
}

fn check_json(t: &PopperTable, report: &AxiomReport) -> serde_json::Value {
    let axioms: Vec<serde_json::Value> = PopperAxiom::ALL
        .iter()
        .map(|&axiom| {
            let witnesses: Vec<serde_json::Value> = report
                .violations
                .iter()
                .filter(|v| v.axiom == axiom)
                .map(|v| {
                    json!({
                        "event": mask_text(t, v.witness.0),
                        "given": mask_text(t, v.witness.1),
                        "detail": v.detail,
                    })
                })
                .collect();
            json!({
                "number": axiom.number(),
                "passed": report.axiom_passed(axiom),
                "witnesses": witnesses,
            })
        })
        .collect();
    json!({
        "kind": "popper",
        "atoms": report.atom_count,
        "passed": report.passed() && report.regular(),
        "regular": report.regular(),
        "conditions_checked": report.conditions_checked,
        "pairs_checked": report.pairs_checked,
        "axioms": axioms,
    })
}

fn mask_text(t: &PopperTable, mask: u64) -> String {
    nap_core::popper::describe_mask(t.atoms(), mask)
}

struct QueryView {
    event_text: String,
    given_text: Option<String>,
    value: FieldValue,
    depth: usize,
}

impl QueryView {
    fn standard_part(&self) -> Rational {
        self.value
            .standard_part()
            .expect("probabilities are finite")
    }

    fn valuation_json(&self) -> serde_json::Value {
        match valuation(&self.value) {
            Rank::Int(k) => json!(k),
            Rank::Top => json!("top"),
        }
    }
}

pub fn query(
    path: &Path,
    event: &str,
    given: Option<&str>,
    depth: usize,
    format: Format,
    approx: bool,
) -> Result<u8, CliError> {
    if depth == 0 {
        return Err(CliError::Input("depth must be at least 1".to_string()));
    }
    let model = LoadedModel::load(path)?;
    let nap = model.as_nap()?;
    let ev = model.eval_event(event)?;
    let value = match given {
        Some(g) => nap.cond(ev, model.eval_event(g)?)?,
        None => nap.prob(ev),
    };
    let view = QueryView {
        event_text: model.describe_event(ev),
        given_text: given.map(|g| {
            model
                .eval_event(g)
                .map(|e| model.describe_event(e))
                .unwrap_or_else(|_| g.to_string())
        }),
        value,
        depth,
    };
    let series = expand(&view.value, depth);
    match format {
        Format::Text => {
            println!("event:         {}", view.event_text);
            if let Some(g) = &view.given_text {
                println!("given:         {}", g);
            }
            println!("exact:         {}", render_value(&view.value));
            println!("standard part: {}", view.standard_part());
            if approx {
                println!("approx:        {}", decimal_string(&view.standard_part(), 12));
            }
            println!("valuation:     {}", valuation(&view.value));
            println!("series:        {}", series);
        }
        Format::Json => {
            let mut out = json!({
                "event": view.event_text,
                "exact": render_value(&view.value),
                "standard_part": view.standard_part().to_string(),
                "valuation": view.valuation_json(),
                "series": series.to_string(),
                "depth": view.depth,
            });
            if let Some(g) = &view.given_text {
                out["given"] = json!(g);
            }
            if approx {
                out["approx"] = json!(decimal_string(&view.standard_part(), 12));
            }
            println!("{}", out);
        }
    }
    Ok(0)
}

pub fn convert(path: &Path, to: TargetKind, out: &Path, format: Format) -> Result<u8, CliError> {
    let model = LoadedModel::load(path)?;
    let data = match to {
        TargetKind::Nap => ModelData::Nap(model.as_nap()?),
        TargetKind::Popper => match &model.data {
            ModelData::Popper(t) => ModelData::Popper(t.clone()),
            ModelData::Nap(m) => ModelData::Popper(nap_to_popper(m)),
        },
    };
    let kind = match &data {
        ModelData::Nap(_) => "nap",
        ModelData::Popper(_) => "popper",
    };
    let file = to_file(&data, &model.named_events)?;
    save(out, &file)?;
    match format {
        Format::Text => println!("wrote {} model to {}", kind, out.display()),
        Format::Json => println!("{}", json!({ "kind": kind, "out": out.display().to_string() })),
    }
    Ok(0)
}

pub fn snapshot(
    path: &Path,
    stages: &[u64],
    event: Option<&str>,
    given: Option<&str>,
    format: Format,
) -> Result<u8, CliError> {
    if stages.is_empty() {
        return Err(CliError::Input("at least one stage is required".to_string()));
    }
    if let Some(&bad) = stages.iter().find(|&&n| n < 2) {
        return Err(CliError::Input(format!(
            "snapshot stages must be at least 2, got {}",
            bad
        )));
    }
    let model = LoadedModel::load(path)?;
    let study = match (&model.data, event) {
        (ModelData::Popper(t), Some(e)) => {
            let ev = model.eval_event(e)?;
            let gv = match given {
                Some(g) => model.eval_event(g)?,
                None => model.space.full_event(),
            };
            bridge::snapshot_pair(t, ev.mask(), gv.mask(), stages)?
        }
        (ModelData::Popper(t), None) => {
            if t.atom_count() > 10 {
                return Err(CliError::Input(
                    "table too large for an all-pairs study; pass --event".to_string(),
                ));
            }
            bridge::snapshot_oracle(t, stages)?
        }
        (ModelData::Nap(m), Some(e)) => {
            let ev = model.eval_event(e)?;
            let gv = match given {
                Some(g) => model.eval_event(g)?,
                None => model.space.full_event(),
            };
            bridge::snapshot_model_pair(m, ev, gv, stages)?
        }
        (ModelData::Nap(m), None) => {
            if m.space().len() > 10 {
                return Err(CliError::Input(
                    "model too large for an all-pairs study; pass --event".to_string(),
                ));
            }
            all_pairs_study(m, stages)?
        }
    };
    match format {
        Format::Text => {
            println!(
                "{:<18} {:<18} {:>6} {:>16} {:>10} {:>14}",
                "event", "given", "stage", "value", "st", "deviation"
            );
            for row in &study.rows {
                println!(
                    "{:<18} {:<18} {:>6} {:>16} {:>10} {:>14}",
                    model.describe_event(Event::from_mask(row.event)),
                    model.describe_event(Event::from_mask(row.given)),
                    row.stage,
                    row.value.to_string(),
                    row.expected.to_string(),
                    row.deviation.to_string(),
                );
            }
            println!(
                "bound: deviation <= K/stage with K = {}",
                study.bound_constant
            );
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = study
                .rows
                .iter()
                .map(|row| {
                    json!({
                        "event": model.describe_event(Event::from_mask(row.event)),
                        "given": model.describe_event(Event::from_mask(row.given)),
                        "stage": row.stage,
                        "value": row.value.to_string(),
                        "standard_part": row.expected.to_string(),
                        "deviation": row.deviation.to_string(),
                    })
                })
                .collect();
            println!(
                "{}",
                json!({
                    "bound_constant": study.bound_constant.to_string(),
                    "rows": rows,
                })
            );
        }
    }
    Ok(0)
}

fn all_pairs_study(m: &NapModel, stages: &[u64]) -> Result<SnapshotStudy, CliError> {
    let full = m.space().full_event().mask();
    let mut rows: Vec<SnapshotRow> = Vec::new();
    let mut bound = Rational::new(0.into(), 1.into());
    for b in 1..=full {
        for a in 0..=full {
            let study = bridge::snapshot_model_pair(
                m,
                Event::from_mask(a),
                Event::from_mask(b),
                stages,
            )?;
            if study.bound_constant > bound {
                bound = study.bound_constant.clone();
            }
            rows.extend(study.rows);
        }
    }
    Ok(SnapshotStudy {
        rows,
        bound_constant: bound,
    })
}

pub fn compare(path: &Path, events: &[String], format: Format) -> Result<u8, CliError> {
    let [left, right] = events else {
        return Err(CliError::Input(
            "compare needs exactly two --event expressions".to_string(),
        ));
    };
    let model = LoadedModel::load(path)?;
    let nap = model.as_nap()?;
    let lv = model.eval_event(left)?;
    let rv = model.eval_event(right)?;
    let lp = nap.prob(lv);
    let rp = nap.prob(rv);
    let field = lp.compare(&rp);
    let lex = nap_core::lexi::compare_lex(&lp, &rp);
    let divergence = lex_divergence(&lp, &rp);
    let agree = field == lex;
    match format {
        Format::Text => {
            println!("left:  {} = {}", model.describe_event(lv), render_value(&lp));
            println!("right: {} = {}", model.describe_event(rv), render_value(&rp));
            println!("field order: {}", order_text(field));
            match &divergence {
                Some((rank, coeff)) => println!(
                    "lex order:   {} (diverging at rank {} with coefficient {})",
                    order_text(lex),
                    rank,
                    coeff
                ),
                None => println!("lex order:   {}", order_text(lex)),
            }
            println!("agree: {}", if agree { "yes" } else { "NO" });
        }
        Format::Json => {
            println!(
                "{}",
                json!({
                    "left": { "event": model.describe_event(lv), "exact": render_value(&lp) },
                    "right": { "event": model.describe_event(rv), "exact": render_value(&rp) },
                    "field": order_text(field),
                    "lex": order_text(lex),
                    "agree": agree,
                    "divergence": divergence.map(|(rank, coeff)| json!({
                        "rank": rank,
                        "coefficient": coeff.to_string(),
                    })),
                })
            );
        }
    }
    Ok(if agree { 0 } else { 1 })
}

fn order_text(o: Ordering) -> &'static str {
    match o {
        Ordering::Less => "less",
        Ordering::Equal => "equal",
        Ordering::Greater => "greater",
    }
}

