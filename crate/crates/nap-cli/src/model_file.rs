//! The model file format: TOML describing either a ranked sample-space
//! model (`kind = "nap"`) or a Popper table (`kind = "popper"`), plus
//! optional named events written in the event-expression grammar.
//!
//! ```toml
//! kind = "nap"
//!
//! [[outcomes]]
//! name = "a"
//! weight = "1"    # exact rational "p/q"
//! rank = 0
//!
//! [events]
//! heads = "a"
//! ```
//!
//! Popper tables carry either a stratified block (`[strata.<rank>]` tables
//! mapping atoms to weights that must sum to 1 per rank) or a dense block of
//! `[[dense]]` entries `{ atom, given, value }` covering every atom and
//! every nonempty condition (conditions are event expressions and collapse
//! to atom sets).

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use nap_core::bridge::popper_to_nap;
use nap_core::eventlang::{self, EventExpr};
use nap_core::events::{Event, NapModel, SampleSpace};
use nap_core::field::{parse_rational, Rational};
use nap_core::popper::{PopperTable, StratifiedMeasure};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outcomes: Vec<OutcomeEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub strata: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dense: Vec<DenseEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub events: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutcomeEntry {
    pub name: String,
    pub weight: String,
    pub rank: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenseEntry {
    pub atom: String,
    pub given: String,
    pub value: String,
}

#[derive(Debug, Clone)]
pub enum ModelData {
    Nap(NapModel),
    Popper(PopperTable),
}

/// A parsed and validated model plus its resolved event bindings.
pub struct LoadedModel {
    pub data: ModelData,
    pub space: SampleSpace,
    pub binding: HashMap<String, Event>,
    /// Original named-event expressions, preserved for re-emission.
    pub named_events: BTreeMap<String, String>,
}

impl LoadedModel {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {}", path.display(), e)))?;
        let file: ModelFile = toml::from_str(&text)
            .map_err(|e| CliError::Input(format!("{}: {}", path.display(), e)))?;
        Self::from_file(file)
    }

    pub fn from_file(file: ModelFile) -> Result<Self, CliError> {
        let data = match file.kind.as_str() {
            "nap" => ModelData::Nap(build_nap(&file)?),
            "popper" => ModelData::Popper(build_popper(&file)?),
            other => {
                return Err(CliError::Input(format!(
                    "unknown model kind '{}', expected \"nap\" or \"popper\"",
                    other
                )))
            }
        };
        let space = match &data {
            ModelData::Nap(m) => m.space().clone(),
            ModelData::Popper(t) => SampleSpace::new(t.atoms().to_vec())
                .map_err(|e| CliError::Input(e.to_string()))?,
        };
        let binding = resolve_events(&space, &file.events)?;
        Ok(LoadedModel {
            data,
            space,
            binding,
            named_events: file.events,
        })
    }

    /// The ranked model view: direct for nap files, via the rank
    /// construction for Popper tables.
    pub fn as_nap(&self) -> Result<NapModel, CliError> {
        match &self.data {
            ModelData::Nap(m) => Ok(m.clone()),
            ModelData::Popper(t) => popper_to_nap(t).map_err(CliError::from),
        }
    }

    /// Parses and evaluates an event expression against this model.
    pub fn eval_event(&self, text: &str) -> Result<Event, CliError> {
        let expr = eventlang::parse(text)
            .map_err(|e| CliError::Input(format!("event '{}': {}", text, e)))?;
        eventlang::evaluate(&expr, &self.binding, &self.space)
            .map_err(|e| CliError::Input(format!("event '{}': {}", text, e)))
    }

    pub fn describe_event(&self, ev: Event) -> String {
        ev.describe(&self.space)
    }
}

fn build_nap(file: &ModelFile) -> Result<NapModel, CliError> {
    if file.outcomes.is_empty() {
        return Err(CliError::Input(
            "a nap model needs at least one [[outcomes]] entry".to_string(),
        ));
    }
    let space = SampleSpace::new(file.outcomes.iter().map(|o| o.name.clone()))
        .map_err(|e| CliError::Input(e.to_string()))?;
    let weights = file
        .outcomes
        .iter()
        .map(|o| parse_weight(&o.weight, &o.name))
        .collect::<Result<Vec<_>, _>>()?;
    let ranks = file.outcomes.iter().map(|o| o.rank).collect();
    NapModel::new(space, weights, ranks).map_err(|e| CliError::Input(e.to_string()))
}

fn parse_weight(text: &str, owner: &str) -> Result<Rational, CliError> {
    parse_rational(text)
        .map_err(|e| CliError::Input(format!("weight of '{}': {}", owner, e)))
}

fn build_popper(file: &ModelFile) -> Result<PopperTable, CliError> {
    if file.atoms.is_empty() {
        return Err(CliError::Input(
            "a popper table needs a nonempty `atoms` list".to_string(),
        ));
    }
    match (file.strata.is_empty(), file.dense.is_empty()) {
        (false, false) => Err(CliError::Input(
            "a popper table takes either a [strata] block or [[dense]] entries, not both"
                .to_string(),
        )),
        (true, true) => Err(CliError::Input(
            "a popper table needs a [strata] block or [[dense]] entries".to_string(),
        )),
        (false, true) => build_stratified(file),
        (true, false) => build_dense(file),
    }
}

fn atom_index(atoms: &[String], name: &str) -> Result<usize, CliError> {
    atoms
        .iter()
        .position(|a| a == name)
        .ok_or_else(|| CliError::Input(format!("unknown atom '{}'", name)))
}

fn build_stratified(file: &ModelFile) -> Result<PopperTable, CliError> {
    let mut by_rank: Vec<(u32, Vec<(usize, Rational)>)> = Vec::new();
    for (rank_key, entries) in &file.strata {
        let rank: u32 = rank_key.parse().map_err(|_| {
            CliError::Input(format!("stratum key '{}' is not a rank number", rank_key))
        })?;
        let mut stratum = Vec::new();
        for (atom, weight) in entries {
            let i = atom_index(&file.atoms, atom)?;
            stratum.push((i, parse_weight(weight, atom)?));
        }
        by_rank.push((rank, stratum));
    }
    by_rank.sort_by_key(|(rank, _)| *rank);
    for pair in by_rank.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(CliError::Input(format!("duplicate stratum rank {}", pair[0].0)));
        }
    }
    let strata = by_rank.into_iter().map(|(_, s)| s).collect();
    let measure = StratifiedMeasure::new(file.atoms.clone(), strata)
        .map_err(|e| CliError::Input(e.to_string()))?;
    Ok(PopperTable::from_stratified(&measure))
}

fn build_dense(file: &ModelFile) -> Result<PopperTable, CliError> {
    let atoms = &file.atoms;
    let m = atoms.len();
    if m > nap_core::popper::MAX_ATOMS {
        return Err(CliError::Input(format!(
            "{} atoms exceed the construction cap of {}",
            m,
            nap_core::popper::MAX_ATOMS
        )));
    }
    let mut rows: Vec<Vec<Option<Rational>>> = vec![vec![None; m]; 1 << m];
    for entry in &file.dense {
        let i = atom_index(atoms, &entry.atom)?;
        let expr = eventlang::parse(&entry.given)
            .map_err(|e| CliError::Input(format!("condition '{}': {}", entry.given, e)))?;
        let indices = eventlang::normal_form(&expr, atoms)
            .map_err(|e| CliError::Input(format!("condition '{}': {}", entry.given, e)))?;
        let mask: u64 = indices.iter().map(|&j| 1u64 << j).sum();
        if mask == 0 {
            return Err(CliError::Input(format!(
                "condition '{}' denotes the empty event",
                entry.given
            )));
        }
        let slot = &mut rows[mask as usize][i];
        if slot.is_some() {
            return Err(CliError::Input(format!(
                "duplicate dense entry for atom '{}' given '{}'",
                entry.atom, entry.given
            )));
        }
        *slot = Some(parse_weight(&entry.value, &entry.atom)?);
    }
    let mut filled = Vec::with_capacity(1 << m);
    filled.push(Vec::new());
    for (mask, row) in rows.into_iter().enumerate().skip(1) {
        let mut out = Vec::with_capacity(m);
        for (i, v) in row.into_iter().enumerate() {
            out.push(v.ok_or_else(|| {
                CliError::Input(format!(
                    "dense table is incomplete: no entry for atom '{}' given mask {:#b}",
                    atoms[i], mask
                ))
            })?);
        }
        filled.push(out);
    }
    PopperTable::from_atom_rows(atoms.clone(), filled).map_err(|e| CliError::Input(e.to_string()))
}

/// Resolves named events: each expression may mention outcome labels and
/// other named events (in any order, as long as the references are acyclic).
fn resolve_events(
    space: &SampleSpace,
    named: &BTreeMap<String, String>,
) -> Result<HashMap<String, Event>, CliError> {
    let mut binding: HashMap<String, Event> = HashMap::new();
    for (i, label) in space.outcomes().iter().enumerate() {
        binding.insert(label.clone(), Event::singleton(i));
    }
    let mut pending: Vec<(&String, EventExpr)> = Vec::new();
    for (name, text) in named {
        if space.index_of(name).is_some() {
            return Err(CliError::Input(format!(
                "named event '{}' shadows an outcome label",
                name
            )));
        }
        let expr = eventlang::parse(text)
            .map_err(|e| CliError::Input(format!("event '{}': {}", name, e)))?;
        pending.push((name, expr));
    }
    while !pending.is_empty() {
        let before = pending.len();
        pending.retain(|(name, expr)| {
            match eventlang::evaluate(expr, &binding, space) {
                Ok(ev) => {
                    binding.insert((*name).clone(), ev);
                    false
                }
                Err(_) => true,
            }
        });
        if pending.len() == before {
            let (name, expr) = &pending[0];
            let err = eventlang::evaluate(expr, &binding, space).unwrap_err();
            return Err(CliError::Input(format!(
                "named event '{}': {} (circular or missing reference)",
                name, err
            )));
        }
    }
    Ok(binding)
}

/// Renders a model back into the file schema.
pub fn to_file(data: &ModelData, named_events: &BTreeMap<String, String>) -> Result<ModelFile, CliError> {
    match data {
        ModelData::Nap(m) => Ok(ModelFile {
            kind: "nap".to_string(),
            outcomes: (0..m.space().len())
                .map(|i| OutcomeEntry {
                    name: m.space().label(i).to_string(),
                    weight: m.weight(i).to_string(),
                    rank: m.rank(i),
                })
                .collect(),
            atoms: Vec::new(),
            strata: BTreeMap::new(),
            dense: Vec::new(),
            events: named_events.clone(),
        }),
        ModelData::Popper(t) => {
            let measure = t.to_stratified().map_err(CliError::from)?;
            let mut strata = BTreeMap::new();
            for k in 0..measure.depth() {
                let mut entries = BTreeMap::new();
                for (i, w) in measure.stratum(k) {
                    entries.insert(measure.atoms()[*i].clone(), w.to_string());
                }
                strata.insert(k.to_string(), entries);
            }
            Ok(ModelFile {
                kind: "popper".to_string(),
                outcomes: Vec::new(),
                atoms: t.atoms().to_vec(),
                strata,
                dense: Vec::new(),
                events: named_events.clone(),
            })
        }
    }
}

pub fn save(path: &Path, file: &ModelFile) -> Result<(), CliError> {
    let text = toml::to_string_pretty(file)
        .map_err(|e| CliError::Input(format!("cannot serialize model: {}", e)))?;
    std::fs::write(path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {}", path.display(), e)))
}
