//! Command execution and report formatting.

use std::fmt::Write as _;
use std::sync::Arc;

use finmodel::chain::{homology, is_quasi_iso, truncate, verify_truncation_colimit, ChainComplex};
use finmodel::fincat::{coproduct, Diagram, Presheaf, PresheafMorphism};
use finmodel::hocat::{self, Certificate};
use finmodel::model::{FactorizationKind, FactorizationTrace, ModelInstance, ReplacementKind, SoaMode};
use finmodel::sset::{self, SimplicialSet};

use crate::workspace::{Command, DiagramSpec, FactorArg, InstanceKind, ModeArg, Op, ReplaceArg, Workspace};

/// Overrides applied to every command; per-command fields take precedence.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub cap: Option<usize>,
    pub budget: Option<u64>,
    pub mode: Option<ModeArg>,
    pub probes: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub text: String,
    pub errors: usize,
}

type Lines = Vec<String>;

#[derive(Debug, thiserror::Error)]
enum CommandError {
    #[error(transparent)]
    Core(#[from] finmodel::Error),
    #[error("{0}")]
    Usage(String),
}

type CmdResult = Result<Lines, CommandError>;

/// Runs every command in order. A failing command is reported inline and the run
/// continues.
pub fn run(ws: &Workspace, opts: &RunOptions) -> Report {
    let mut text = String::new();
    let mut errors = 0;
    let _ = writeln!(text, "instance {}", ws.document.instance);
    for (i, c) in ws.document.commands.iter().enumerate() {
        let _ = writeln!(text, "[{i}] {}", c.op.name());
        let out = match ws.kind {
            InstanceKind::Sset(n) => instance_for(n, c, opts).map_err(CommandError::from).and_then(|m| run_sset(ws, &m, c, opts)),
            InstanceKind::Chain(_) => run_chain(ws, c),
        };
        match out {
            Ok(lines) => lines.iter().for_each(|l| {
                let _ = writeln!(text, "  {l}");
            }),
            Err(e) => {
                errors += 1;
                let _ = writeln!(text, "  error: {e}");
                if let CommandError::Core(finmodel::Error::CapExhausted { trace, .. }) = &e {
                    trace_lines(trace).iter().for_each(|l| {
                        let _ = writeln!(text, "  {l}");
                    });
                }
            }
        }
    }
    Report { text, errors }
}

fn instance_for(n: usize, c: &Command, opts: &RunOptions) -> finmodel::Result<ModelInstance> {
    let mut m = sset::instance(n)?;
    if let Some(cap) = c.cap.or(opts.cap) {
        m = m.with_cap(cap)?;
    }
    if let Some(b) = c.budget.or(opts.budget) {
        m = m.with_budget(b);
    }
    match c.mode.or(opts.mode) {
        Some(ModeArg::Naive) => m = m.with_mode(SoaMode::Naive),
        Some(ModeArg::Marked) => m = m.with_mode(SoaMode::Marked),
        None => {}
    }
    Ok(m)
}

fn sizes(x: &Presheaf) -> String {
    let s: Vec<String> = x.sizes().iter().map(usize::to_string).collect();
    format!("[{}]", s.join(","))
}

fn nondegenerate(x: &Arc<Presheaf>) -> String {
    match SimplicialSet::from_presheaf(x) {
        Ok(s) => {
            let c: Vec<String> = (0..s.level()).map(|d| s.nondegenerate_count(d).to_string()).collect();
            format!("cells [{}]", c.join(","))
        }
        Err(_) => format!("sizes {}", sizes(x)),
    }
}

fn components(f: &PresheafMorphism) -> String {
    let parts: Vec<String> = f
        .components()
        .iter()
        .map(|c| format!("[{}]", c.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    parts.join(" ")
}

fn trace_lines(t: &FactorizationTrace) -> Lines {
    let mut out = vec![format!("terminated {}", t.terminated), format!("steps {}", t.steps_used)];
    for (i, s) in t.stages.iter().enumerate() {
        out.push(format!("stage {i}: {}", nondegenerate(&s.object)));
    }
    out
}

fn certificate_lines(c: &Certificate) -> Lines {
    let mut out = vec![format!(
        "certificate {}: {} test objects, {} cocones, {} failures",
        if c.holds() { "holds" } else { "fails" },
        c.test_objects,
        c.cocones,
        c.failures
    )];
    if let Some((w, idx)) = &c.first_failure {
        out.push(format!("first failure: test {w}, classes {idx:?}"));
    }
    if let Some((w, idx, count)) = &c.non_unique {
        out.push(format!("non-unique: test {w}, classes {idx:?}, {count} factorizations"));
    }
    out
}

fn usage(msg: impl Into<String>) -> CommandError {
    CommandError::Usage(msg.into())
}

fn need<'a, T>(v: &'a Option<T>, field: &str) -> Result<&'a T, CommandError> {
    v.as_ref().ok_or_else(|| usage(format!("missing parameter `{field}`")))
}

fn run_sset(ws: &Workspace, m: &ModelInstance, c: &Command, opts: &RunOptions) -> CmdResult {
    let obj = |name: &String| -> Arc<Presheaf> { ws.object(name).clone() };
    let objs = |names: &[String]| -> Vec<Arc<Presheaf>> { names.iter().map(|n| obj(n)).collect() };
    let mor = |name: &String| -> &PresheafMorphism { &ws.morphisms[name] };
    let probes = || -> Result<Vec<Arc<Presheaf>>, CommandError> {
        let names = c.probes.as_ref().or(opts.probes.as_ref()).ok_or_else(|| usage("missing parameter `A`"))?;
        names
            .iter()
            .map(|n| ws.objects.get(n).map(|s| s.presheaf().clone()).ok_or_else(|| usage(format!("unresolved name `{n}`"))))
            .collect()
    };
    let tests = || c.tests.as_deref().map(objs);

    let mut out = Lines::new();
    match c.op {
        Op::Validate => {
            for (name, x) in &ws.objects {
                let cells: Vec<String> = (0..x.level()).map(|d| x.nondegenerate_count(d).to_string()).collect();
                out.push(format!("object {name}: cells [{}]", cells.join(",")));
            }
            for (name, f) in &ws.morphisms {
                let spec = &ws.document.morphisms[name];
                out.push(format!("morphism {name}: {} -> {} natural {}", spec.source, spec.target, f.naturality_violations().is_empty()));
            }
        }
        Op::Factorize => {
            let kind = match c.kind.unwrap_or(FactorArg::CofTrivFib) {
                FactorArg::CofTrivFib => FactorizationKind::CofTrivFib,
                FactorArg::TrivCofFib => FactorizationKind::TrivCofFib,
            };
            let t = m.factorize(mor(need(&c.morphism, "morphism")?), kind)?;
            if !t.terminated {
                return Err(CommandError::Core(finmodel::Error::CapExhausted { cap: m.iteration_cap(), trace: Box::new(t) }));
            }
            out.extend(trace_lines(&t));
        }
        Op::Replace => {
            let which = match c.which.unwrap_or(ReplaceArg::Full) {
                ReplaceArg::Cofibrant => ReplacementKind::Cofibrant,
                ReplaceArg::Fibrant => ReplacementKind::Fibrant,
                ReplaceArg::Full => ReplacementKind::Full,
            };
            let r = m.replacement(&obj(need(&c.object, "object")?), which)?;
            out.push(nondegenerate(&r.object));
        }
        Op::Cylinder => {
            let cyl = m.cylinder(&obj(need(&c.object, "object")?))?;
            out.push(nondegenerate(&cyl.object));
        }
        Op::IsWeq => out.push(m.is_weak_equivalence(mor(need(&c.morphism, "morphism")?))?.to_string()),
        Op::HoHom => {
            let h = hocat::ho_hom(m, &obj(need(&c.source, "source")?), &obj(need(&c.target, "target")?))?;
            out.push(format!("classes {}", h.len()));
            for (i, k) in h.classes.iter().enumerate() {
                out.push(format!("{i}: {}", components(k.representative(m)?)));
            }
        }
        Op::HoProduct => {
            let p = hocat::ho_product(m, &objs(need(&c.objects, "objects")?))?;
            out.push(nondegenerate(&p.object));
            out.push(format!("projections {}", p.projections.len()));
        }
        Op::HoCoproduct => {
            let p = hocat::ho_coproduct(m, &objs(need(&c.objects, "objects")?))?;
            out.push(nondegenerate(&p.object));
            out.push(format!("injections {}", p.injections.len()));
        }
        Op::HomotopyPushout => {
            let (f, g) = (mor(need(&c.left, "left")?), mor(need(&c.right, "right")?));
            let hp = hocat::homotopy_pushout(m, f, g)?;
            out.push(nondegenerate(&hp.object));
            out.push(format!("commutes {}", hp.commutes(m, f, g)?));
            if let Some(t) = tests() {
                out.extend(certificate_lines(&hp.certify(m, f, g, &t)?));
            }
        }
        Op::WeakCoequalizer => {
            let (f, g) = (mor(need(&c.left, "left")?), mor(need(&c.right, "right")?));
            let wc = hocat::weak_coequalizer_of_maps(m, f, g)?;
            let (pf, pg) = (hocat::project(m, f)?, hocat::project(m, g)?);
            out.push(nondegenerate(&wc.object));
            out.push(format!("coequalizes {}", wc.coequalizes(m, &pf, &pg)?));
            if let Some(t) = tests() {
                out.extend(certificate_lines(&wc.certify(m, &pf, &pg, &t)?));
            }
        }
        Op::WeakColimit | Op::Comparison => {
            let d = match need(&c.diagram, "diagram")? {
                DiagramSpec::Span(f, g) => Diagram::span(mor(f), mor(g))?,
                DiagramSpec::Discrete(xs) => Diagram::discrete(objs(xs))?,
            };
            if c.op == Op::WeakColimit {
                let w = hocat::standard_weak_colimit(m, &d)?;
                out.push(nondegenerate(&w.object));
                out.push(format!("legs {}", w.legs.len()));
                if let Some(t) = tests() {
                    out.extend(certificate_lines(&w.certify(m, &d, &t)?));
                }
            } else {
                let cmp = hocat::comparison_morphism(m, &d)?;
                out.push(format!("weak {}", nondegenerate(&cmp.weak.object)));
                out.push(format!("strict {}", nondegenerate(&cmp.strict.object)));
                out.push(format!("verified {}", cmp.verify(m)?));
            }
        }
        Op::EImage => {
            let a = probes()?;
            let e = hocat::canonical_image(m, &obj(need(&c.object, "object")?), &a)?;
            let counts: Vec<String> = e.homs.iter().map(|h| h.len().to_string()).collect();
            out.push(format!("probe hom sizes [{}]", counts.join(",")));
            out.push(format!("probe arrows {}", e.arrows.len()));
        }
        Op::CheckFullFaithful => {
            let r = hocat::check_a_full_faithful(m, &probes()?, &objs(need(&c.sample, "sample")?))?;
            out.push(format!("pairs {}, transformations {}", r.pairs, r.transformations));
            out.push(format!("unrealized {:?}", r.unrealized));
            out.push(format!("collisions {:?}", r.collisions));
            out.push(if r.passed() { "pass".into() } else { "fail".into() });
        }
        Op::Phantom => {
            let (f, g) = (mor(need(&c.left, "left")?), mor(need(&c.right, "right")?));
            let eq = hocat::phantom_equivalent(m, &hocat::project(m, f)?, &hocat::project(m, g)?, &probes()?)?;
            out.push(format!("phantom-equivalent {eq}"));
        }
        Op::PhantomPair => {
            let a = probes()?;
            let pair = hocat::weakly_initial_phantom_pair(m, &obj(need(&c.object, "object")?), &a)?;
            out.push(format!("source {}", nondegenerate(&pair.source)));
            out.push(format!("object {}", nondegenerate(&pair.object)));
            out.push(format!("covering {}", pair.covering.len()));
            if let Some(t) = tests() {
                let cert = pair.certify(m, &a, &t)?;
                out.push(format!(
                    "certificate {}: {} targets, {} pairs, {} failures",
                    if cert.holds() { "holds" } else { "fails" },
                    cert.targets,
                    cert.pairs,
                    cert.failures
                ));
            }
        }
        Op::Support => {
            let f = mor(need(&c.morphism, "morphism")?);
            let cocone = coproduct(&objs(need(&c.summands, "summands")?), m.base())?;
            if **f.target() != *cocone.object {
                return Err(usage("morphism target is not the coproduct of the summands"));
            }
            let s = hocat::subcoproduct_support(f, &cocone)?;
            out.push(format!("indices {:?}", s.indices));
        }
        Op::Classify => out.extend(classify(ws, m, c)?),
        Op::Homology | Op::QuasiIso | Op::Truncate | Op::VerifyTruncationColimit => {
            return Err(usage("chain command in a simplicial workspace"))
        }
    }
    Ok(out)
}

fn classify(ws: &Workspace, m: &ModelInstance, c: &Command) -> CmdResult {
    let InstanceKind::Sset(n) = ws.kind else { unreachable!("classify is simplicial") };
    let mut items: Vec<(String, SimplicialSet)> = Vec::new();
    if let Some(names) = &c.objects {
        items.extend(names.iter().map(|k| (k.clone(), ws.objects[k].clone())));
    }
    if let Some(spec) = c.corpus {
        let corpus = sset::multigraph_corpus(n, spec.vertices, spec.edges)?;
        items.extend(corpus.into_iter().enumerate().map(|(i, x)| (format!("#{i}"), x)));
    }
    let mut table: std::collections::BTreeMap<String, Vec<String>> = std::collections::BTreeMap::new();
    for (name, x) in items {
        let key = match n {
            1 => if x.presheaf().is_empty() { "empty".to_string() } else { "nonempty".to_string() },
            2 => format!("pi0={}", sset::pi0(x.presheaf())?.count),
            _ => format!("forest {}", sset::forest_invariant_in(m, x.presheaf())?),
        };
        table.entry(key).or_default().push(name);
    }
    Ok(table.into_iter().map(|(k, v)| format!("{k}: {} [{}]", v.len(), v.join(","))).collect())
}

fn run_chain(ws: &Workspace, c: &Command) -> CmdResult {
    let cpx = |name: &String| -> &ChainComplex { &ws.complexes[name] };
    let mut out = Lines::new();
    match c.op {
        Op::Validate => {
            for (name, x) in &ws.complexes {
                let (lo, hi) = x.range();
                out.push(format!("complex {name}: degrees {lo}..={hi}, complex {}", x.is_complex()));
            }
            for name in ws.chain_maps.keys() {
                out.push(format!("chain-map {name}"));
            }
        }
        Op::IsWeq | Op::QuasiIso => {
            out.push(is_quasi_iso(&ws.chain_maps[need(&c.map, "map")?])?.to_string());
        }
        Op::Homology => {
            let x = cpx(need(&c.complex, "complex")?);
            let degrees = match &c.degrees {
                Some(d) => d.clone(),
                None => x.support().map(|(lo, hi)| (lo..=hi).collect()).unwrap_or_default(),
            };
            out.extend(degrees.iter().map(|&d| format!("H_{d} = {}", homology(x, d))));
        }
        Op::Truncate => {
            let x = cpx(need(&c.complex, "complex")?);
            let k = *need(&c.k, "k")?;
            let t = truncate(x, k)?;
            let (lo, hi) = t.range();
            let dims: Vec<String> = (lo..=hi).map(|d| format!("{d}:{}", t.dim(d))).collect();
            out.push(format!("dims {}", dims.join(" ")));
            out.push(format!("square-zero defects {:?}", t.square_zero_defects()));
        }
        Op::VerifyTruncationColimit => {
            let x = cpx(need(&c.complex, "complex")?);
            let stage = c.stage.unwrap_or_else(|| x.support().map(|(lo, hi)| lo.abs().max(hi.abs()) + 1).unwrap_or(1));
            let r = verify_truncation_colimit(x, stage)?;
            if !r.square_zero_defects.is_empty() {
                out.push(format!("square-zero defects (k, n) {:?}", r.square_zero_defects));
            }
            out.push(match &r.failure {
                None if r.passed() => "pass".into(),
                None => "fail".into(),
                Some(f) => format!("fail: {f}"),
            });
        }
        _ => return Err(usage(format!("`{}` is not available for chain complexes", c.op.name()))),
    }
    Ok(out)
}
