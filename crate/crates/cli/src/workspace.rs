//! Workspace documents: JSON input, validation and name resolution.

use std::collections::BTreeMap;
use std::sync::Arc;

use finmodel::chain::{ChainComplex, ChainMap, Matrix};
use finmodel::fincat::{MapSearch, PresheafMorphism, DEFAULT_BUDGET};
use finmodel::sset::{self, Cell, ComplexBuilder, SimplicialSet};
use serde::{Deserialize, Serialize};

/// A parsed but unvalidated workspace document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    /// `sset:1`, `sset:2`, `sset:3` or `chain:<prime>`.
    pub instance: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub objects: BTreeMap<String, ObjectSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub morphisms: BTreeMap<String, MorphismSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub complexes: BTreeMap<String, ComplexSpec>,
    #[serde(default, rename = "chain-maps", skip_serializing_if = "BTreeMap::is_empty")]
    pub chain_maps: BTreeMap<String, ChainMapSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub commands: Vec<Command>,
}

/// An object: a preset name (`point`, `simplex:2`, `horn:2:0`, …) or nondegenerate
/// cells per level, each cell listing its faces `d_0, …, d_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObjectSpec {
    Preset(String),
    Cells(Vec<Vec<Vec<CellSpec>>>),
}

/// A nondegenerate cell one level down by index, or an explicit normal form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CellSpec {
    Index(usize),
    Normal { sigma: Vec<usize>, dim: usize, index: usize },
}

/// A morphism: images of the source's nondegenerate cells per level, or a preset
/// (`identity`, `unique`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images: Option<Vec<Vec<CellSpec>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
}

/// A chain complex: `d[i]` is `d_{lo+i}` as row-major integers mod p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub lo: i64,
    pub dims: Vec<usize>,
    pub d: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainMapSpec {
    pub source: String,
    pub target: String,
    pub lo: i64,
    pub maps: Vec<Vec<i64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Op {
    Validate,
    Factorize,
    Replace,
    Cylinder,
    IsWeq,
    HoHom,
    HoProduct,
    HoCoproduct,
    HomotopyPushout,
    WeakCoequalizer,
    WeakColimit,
    Comparison,
    EImage,
    CheckFullFaithful,
    Phantom,
    PhantomPair,
    Support,
    Classify,
    Homology,
    QuasiIso,
    Truncate,
    VerifyTruncationColimit,
}

impl Op {
    pub fn name(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
    }

    fn is_chain(self) -> bool {
        matches!(self, Op::Validate | Op::IsWeq | Op::Homology | Op::QuasiIso | Op::Truncate | Op::VerifyTruncationColimit)
    }

    fn is_sset(self) -> bool {
        !matches!(self, Op::Homology | Op::QuasiIso | Op::Truncate | Op::VerifyTruncationColimit)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorArg {
    CofTrivFib,
    TrivCofFib,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReplaceArg {
    Cofibrant,
    Fibrant,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Naive,
    Marked,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum DiagramSpec {
    /// Two morphisms out of a common object.
    Span(String, String),
    Discrete(Vec<String>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub vertices: usize,
    pub edges: usize,
}

/// One command. Which parameters are required depends on `op`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Command {
    pub op: Op,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objects: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morphism: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<i64>>,
    #[serde(default, rename = "A", skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tests: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summands: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub which: Option<ReplaceArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<FactorArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagram: Option<DiagramSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus: Option<CorpusSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeArg>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WorkspaceError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: unresolved name `{name}`")]
    Unresolved { path: String, name: String },
    #[error("{path}: missing parameter `{field}`")]
    MissingParameter { path: String, field: String },
    #[error("{path}: type mismatch: {message}")]
    TypeMismatch { path: String, message: String },
    #[error("{path}: invariant violation: {message}")]
    Invariant { path: String, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceKind {
    Sset(usize),
    Chain(u64),
}

/// A validated document with every name resolved.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub document: Document,
    pub kind: InstanceKind,
    pub objects: BTreeMap<String, SimplicialSet>,
    pub morphisms: BTreeMap<String, PresheafMorphism>,
    pub complexes: BTreeMap<String, ChainComplex>,
    pub chain_maps: BTreeMap<String, ChainMap>,
}

/// Parses JSON text into a document.
pub fn parse_document(text: &str) -> Result<Document, WorkspaceError> {
    serde_json::from_str(text).map_err(|e| WorkspaceError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Canonical JSON form of a document.
pub fn serialize_document(doc: &Document) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

/// Parses and validates in one step.
pub fn parse(text: &str) -> Result<Workspace, Vec<WorkspaceError>> {
    let doc = parse_document(text).map_err(|e| vec![e])?;
    validate(doc)
}

fn core_error(path: &str, e: finmodel::Error) -> WorkspaceError {
    match e {
        finmodel::Error::IllTyped(message) => WorkspaceError::Invariant { path: path.into(), message },
        other => WorkspaceError::TypeMismatch { path: path.into(), message: other.to_string() },
    }
}

fn parse_instance(s: &str) -> Option<InstanceKind> {
    let (kind, arg) = s.split_once(':')?;
    match kind {
        "sset" => arg.parse().ok().filter(|n| (1..=3).contains(n)).map(InstanceKind::Sset),
        "chain" => arg.parse().ok().map(InstanceKind::Chain),
        _ => None,
    }
}

fn to_cell(level: usize, spec: &CellSpec) -> Cell {
    match spec {
        CellSpec::Index(i) => Cell::nondegenerate(level, *i),
        CellSpec::Normal { sigma, dim, index } => Cell::degenerate(sigma.clone(), *dim, *index),
    }
}

fn preset_object(n: usize, name: &str) -> Result<SimplicialSet, String> {
    let parts: Vec<&str> = name.split(':').collect();
    let num = |i: usize| -> Result<usize, String> {
        parts.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| format!("preset `{name}` needs a numeric argument"))
    };
    let r = match parts[0] {
        "empty" => sset::discrete(n, 0),
        "point" | "terminal" => sset::discrete(n, 1),
        "discrete" => sset::discrete(n, num(1)?),
        "bouquet" => sset::bouquet(n, num(1)?),
        "simplex" => sset::simplex(n, num(1)?).map(|p| p.complex),
        "boundary" => sset::boundary(n, num(1)?).map(|p| p.complex),
        "horn" => sset::horn(n, num(1)?, num(2)?).map(|p| p.complex),
        "z2" if n == 3 => sset::z2_classifying(),
        _ => return Err(format!("unknown object preset `{name}`")),
    };
    r.map_err(|e| e.to_string())
}

fn build_object(n: usize, spec: &ObjectSpec) -> Result<SimplicialSet, String> {
    match spec {
        ObjectSpec::Preset(name) => preset_object(n, name),
        ObjectSpec::Cells(levels) => {
            if levels.len() > n {
                return Err(format!("{} levels given for a level-{n} instance", levels.len()));
            }
            let mut b = ComplexBuilder::new(n);
            for (d, cells) in levels.iter().enumerate() {
                for faces in cells {
                    if d == 0 {
                        if !faces.is_empty() {
                            return Err("vertices have no faces".into());
                        }
                        b.vertex();
                    } else {
                        b.cell(d, faces.iter().map(|f| to_cell(d - 1, f)).collect());
                    }
                }
            }
            b.build().map_err(|e| e.to_string())
        }
    }
}

fn build_complex(p: u64, spec: &ComplexSpec) -> finmodel::Result<ChainComplex> {
    let dim = |n: i64| {
        let i = n - spec.lo;
        if i < 0 || i >= spec.dims.len() as i64 {
            0
        } else {
            spec.dims[i as usize]
        }
    };
    let diffs = spec
        .d
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let n = spec.lo + i as i64;
            Matrix::from_rows(p, dim(n - 1), dim(n), e)
        })
        .collect::<finmodel::Result<Vec<_>>>()?;
    ChainComplex::new(p, spec.lo, spec.dims.clone(), diffs)
}

/// Validates a document: builds objects, morphisms and complexes and checks that every
/// command's names resolve. Collects every error found.
pub fn validate(document: Document) -> Result<Workspace, Vec<WorkspaceError>> {
    let mut errors = Vec::new();
    let Some(kind) = parse_instance(&document.instance) else {
        return Err(vec![WorkspaceError::TypeMismatch {
            path: "instance".into(),
            message: format!("unknown instance `{}`", document.instance),
        }]);
    };
    let mut ws = Workspace {
        document: document.clone(),
        kind,
        objects: BTreeMap::new(),
        morphisms: BTreeMap::new(),
        complexes: BTreeMap::new(),
        chain_maps: BTreeMap::new(),
    };
    match kind {
        InstanceKind::Sset(n) => {
            if !document.complexes.is_empty() || !document.chain_maps.is_empty() {
                errors.push(WorkspaceError::TypeMismatch {
                    path: "complexes".into(),
                    message: "chain data in a simplicial workspace".into(),
                });
            }
            for (name, spec) in &document.objects {
                match build_object(n, spec) {
                    Ok(x) => {
                        ws.objects.insert(name.clone(), x);
                    }
                    Err(message) => {
                        errors.push(WorkspaceError::Invariant { path: format!("objects.{name}"), message })
                    }
                }
            }
            for (name, spec) in &document.morphisms {
                let path = format!("morphisms.{name}");
                let (Some(s), Some(t)) = (ws.objects.get(&spec.source), ws.objects.get(&spec.target)) else {
                    for end in [&spec.source, &spec.target] {
                        if !document.objects.contains_key(end) {
                            errors.push(WorkspaceError::Unresolved { path: path.clone(), name: end.clone() });
                        }
                    }
                    continue;
                };
                match build_morphism(s, t, spec) {
                    Ok(m) => {
                        ws.morphisms.insert(name.clone(), m);
                    }
                    Err(message) => errors.push(WorkspaceError::TypeMismatch { path, message }),
                }
            }
        }
        InstanceKind::Chain(p) => {
            if !document.objects.is_empty() || !document.morphisms.is_empty() {
                errors.push(WorkspaceError::TypeMismatch {
                    path: "objects".into(),
                    message: "simplicial data in a chain workspace".into(),
                });
            }
            for (name, spec) in &document.complexes {
                match build_complex(p, spec) {
                    Ok(c) => {
                        ws.complexes.insert(name.clone(), c);
                    }
                    Err(e) => errors.push(core_error(&format!("complexes.{name}"), e)),
                }
            }
            for (name, spec) in &document.chain_maps {
                let path = format!("chain-maps.{name}");
                let (Some(s), Some(t)) = (ws.complexes.get(&spec.source), ws.complexes.get(&spec.target)) else {
                    for end in [&spec.source, &spec.target] {
                        if !document.complexes.contains_key(end) {
                            errors.push(WorkspaceError::Unresolved { path: path.clone(), name: end.clone() });
                        }
                    }
                    continue;
                };
                let built = spec
                    .maps
                    .iter()
                    .enumerate()
                    .map(|(i, e)| {
                        let n = spec.lo + i as i64;
                        Matrix::from_rows(p, t.dim(n), s.dim(n), e)
                    })
                    .collect::<finmodel::Result<Vec<_>>>()
                    .and_then(|maps| ChainMap::new(s.clone(), t.clone(), spec.lo, maps));
                match built {
                    Ok(f) => {
                        ws.chain_maps.insert(name.clone(), f);
                    }
                    Err(e) => errors.push(core_error(&path, e)),
                }
            }
        }
    }
    for (i, c) in document.commands.iter().enumerate() {
        check_command(&ws, i, c, &mut errors);
    }
    if errors.is_empty() {
        Ok(ws)
    } else {
        Err(errors)
    }
}

fn build_morphism(s: &SimplicialSet, t: &SimplicialSet, spec: &MorphismSpec) -> Result<PresheafMorphism, String> {
    match (&spec.images, spec.preset.as_deref()) {
        (Some(images), None) => {
            let cells: Vec<Vec<Cell>> =
                images.iter().enumerate().map(|(d, row)| row.iter().map(|c| to_cell(d, c)).collect()).collect();
            let mut padded = cells;
            padded.resize(s.level(), Vec::new());
            s.morphism(t, &padded).map_err(|e| e.to_string())
        }
        (None, Some("identity")) => {
            if s.presheaf() != t.presheaf() {
                return Err("identity between different objects".into());
            }
            Ok(PresheafMorphism::identity(s.presheaf()))
        }
        (None, Some("unique")) => {
            let maps = MapSearch::new(s.presheaf(), t.presheaf())
                .collect(s.presheaf(), t.presheaf(), DEFAULT_BUDGET)
                .map_err(|e| e.to_string())?;
            match <[PresheafMorphism; 1]>::try_from(maps) {
                Ok([m]) => Ok(m),
                Err(v) => Err(format!("preset `unique` needs exactly one map, found {}", v.len())),
            }
        }
        (None, Some(other)) => Err(format!("unknown morphism preset `{other}`")),
        (Some(_), Some(_)) => Err("give either images or a preset, not both".into()),
        (None, None) => Err("morphism needs images or a preset".into()),
    }
}

fn check_command(ws: &Workspace, i: usize, c: &Command, errors: &mut Vec<WorkspaceError>) {
    let path = format!("commands[{i}]");
    let chain = matches!(ws.kind, InstanceKind::Chain(_));
    if (chain && !c.op.is_chain()) || (!chain && !c.op.is_sset()) {
        errors.push(WorkspaceError::TypeMismatch {
            path,
            message: format!("`{}` is not available for {}", c.op.name(), ws.document.instance),
        });
        return;
    }
    let require = |field: &str, present: bool, errors: &mut Vec<WorkspaceError>| {
        if !present {
            errors.push(WorkspaceError::MissingParameter { path: path.clone(), field: field.into() });
        }
    };
    let resolve = |name: &String, known: bool, errors: &mut Vec<WorkspaceError>| {
        if !known {
            errors.push(WorkspaceError::Unresolved { path: path.clone(), name: name.clone() });
        }
    };
    let obj = |n: &String| ws.objects.contains_key(n) || ws.document.objects.contains_key(n);
    let mor = |n: &String| ws.morphisms.contains_key(n) || ws.document.morphisms.contains_key(n);
    let cpx = |n: &String| ws.complexes.contains_key(n) || ws.document.complexes.contains_key(n);
    let cmap = |n: &String| ws.chain_maps.contains_key(n) || ws.document.chain_maps.contains_key(n);

    let single_obj = |field: &str, v: &Option<String>, errors: &mut Vec<WorkspaceError>| {
        require(field, v.is_some(), errors);
        if let Some(n) = v {
            resolve(n, obj(n), errors);
        }
    };
    let single_mor = |field: &str, v: &Option<String>, errors: &mut Vec<WorkspaceError>| {
        require(field, v.is_some(), errors);
        if let Some(n) = v {
            resolve(n, mor(n), errors);
        }
    };
    let objs = |field: &str, v: &Option<Vec<String>>, needed: bool, errors: &mut Vec<WorkspaceError>| {
        if needed {
            require(field, v.is_some(), errors);
        }
        for n in v.iter().flatten() {
            resolve(n, obj(n), errors);
        }
    };

    match c.op {
        Op::Validate => {}
        Op::Factorize => single_mor("morphism", &c.morphism, errors),
        Op::Replace | Op::Cylinder => single_obj("object", &c.object, errors),
        Op::IsWeq => {
            if chain {
                require("map", c.map.is_some(), errors);
                if let Some(n) = &c.map {
                    resolve(n, cmap(n), errors);
                }
            } else {
                single_mor("morphism", &c.morphism, errors);
            }
        }
        Op::HoHom => {
            single_obj("source", &c.source, errors);
            single_obj("target", &c.target, errors);
        }
        Op::HoProduct | Op::HoCoproduct => objs("objects", &c.objects, true, errors),
        Op::HomotopyPushout | Op::WeakCoequalizer | Op::Phantom => {
            single_mor("left", &c.left, errors);
            single_mor("right", &c.right, errors);
            objs("tests", &c.tests, false, errors);
            objs("A", &c.probes, false, errors);
        }
        Op::WeakColimit | Op::Comparison => {
            require("diagram", c.diagram.is_some(), errors);
            match &c.diagram {
                Some(DiagramSpec::Span(f, g)) => {
                    resolve(f, mor(f), errors);
                    resolve(g, mor(g), errors);
                }
                Some(DiagramSpec::Discrete(xs)) => xs.iter().for_each(|x| resolve(x, obj(x), errors)),
                None => {}
            }
            objs("tests", &c.tests, false, errors);
        }
        Op::EImage => {
            single_obj("object", &c.object, errors);
            objs("A", &c.probes, false, errors);
        }
        Op::CheckFullFaithful => {
            objs("A", &c.probes, false, errors);
            objs("sample", &c.sample, true, errors);
        }
        Op::PhantomPair => {
            single_obj("object", &c.object, errors);
            objs("A", &c.probes, false, errors);
            objs("tests", &c.tests, false, errors);
        }
        Op::Support => {
            single_mor("morphism", &c.morphism, errors);
            objs("summands", &c.summands, true, errors);
        }
        Op::Classify => {
            objs("objects", &c.objects, false, errors);
            require("objects or corpus", c.objects.is_some() || c.corpus.is_some(), errors);
        }
        Op::Homology | Op::Truncate | Op::VerifyTruncationColimit => {
            require("complex", c.complex.is_some(), errors);
            if let Some(n) = &c.complex {
                resolve(n, cpx(n), errors);
            }
            if c.op == Op::Truncate {
                require("k", c.k.is_some(), errors);
            }
        }
        Op::QuasiIso => {
            require("map", c.map.is_some(), errors);
            if let Some(n) = &c.map {
                resolve(n, cmap(n), errors);
            }
        }
    }
}

impl Workspace {
    pub fn object(&self, name: &str) -> &Arc<finmodel::fincat::Presheaf> {
        self.objects[name].presheaf()
    }
}
