//! The small object argument over finite presheaf categories, and the homotopy
//! theory derived from it: replacements, cylinders, left homotopy, and weak
//! equivalences.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::fincat::{
    bottoms_for, coproduct, enumerate_maps, find_isomorphism, has_rlp, lift_square, pushout, FinCategory, MapSearch,
    Presheaf, PresheafMorphism, DEFAULT_BUDGET,
};

pub const DEFAULT_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SoaMode {
    /// Attach one cell for every span `(u, h)` admitting some bottom map, using the
    /// first such bottom map. Only the first step of a factorization runs naively;
    /// later steps are marked, since naive iteration never stabilises.
    Naive,
    /// Attach a cell only for squares that have no lift through the current stage.
    Marked,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorizationKind {
    /// (cofibration, trivial fibration), built from the generating cofibrations.
    CofTrivFib,
    /// (trivial cofibration, fibration), built from the generating trivial cofibrations.
    TrivCofFib,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WeqStrategy {
    /// Use the instance oracle when one is installed, searching otherwise.
    Oracle,
    /// Always decide by homotopy-inverse search.
    Search,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReplacementKind {
    Cofibrant,
    Fibrant,
    Full,
}

/// One stage `A -α-> F_i -β-> B` of a factorization.
#[derive(Clone, Debug)]
pub struct Stage {
    pub object: Arc<Presheaf>,
    pub alpha: PresheafMorphism,
    pub beta: PresheafMorphism,
}

#[derive(Clone, Debug)]
pub struct FactorizationTrace {
    pub input: PresheafMorphism,
    pub stages: Vec<Stage>,
    pub terminated: bool,
    pub steps_used: usize,
}

impl FactorizationTrace {
    pub fn last(&self) -> &Stage {
        self.stages.last().expect("a trace always has its initial stage")
    }

    pub fn left(&self) -> &PresheafMorphism {
        &self.last().alpha
    }

    pub fn right(&self) -> &PresheafMorphism {
        &self.last().beta
    }

    pub fn middle(&self) -> &Arc<Presheaf> {
        &self.last().object
    }
}

/// Result of one small-object step on `f: A -> B`.
#[derive(Clone, Debug)]
pub struct SoaStep {
    pub alpha: PresheafMorphism,
    pub beta: PresheafMorphism,
    pub cells: usize,
}

/// An object together with its comparison map. For cofibrant replacement the map is
/// `q: QX -> X`; for fibrant and full replacement it is `v: X -> R_f X`, resp.
/// `v: QX -> RX`.
#[derive(Clone, Debug)]
pub struct Replacement {
    pub object: Arc<Presheaf>,
    pub comparison: PresheafMorphism,
}

/// A factorization `K ⊔ K -γ-> C(K) -σ-> K` of the codiagonal.
#[derive(Clone, Debug)]
pub struct CylinderData {
    pub object: Arc<Presheaf>,
    pub gamma: PresheafMorphism,
    pub gamma1: PresheafMorphism,
    pub gamma2: PresheafMorphism,
    pub sigma: PresheafMorphism,
}

/// A pair of maps that are mutually inverse up to left homotopy.
#[derive(Clone, Debug)]
pub struct HomotopyEquivalence {
    pub forward: PresheafMorphism,
    pub backward: PresheafMorphism,
}

pub type WeqOracle = Arc<dyn Fn(&PresheafMorphism) -> Result<bool> + Send + Sync>;

#[derive(Default)]
struct Cache {
    cofibrant: Mutex<HashMap<Presheaf, Arc<Replacement>>>,
    fibrant: Mutex<HashMap<Presheaf, Arc<Replacement>>>,
    cylinders: Mutex<HashMap<Presheaf, Arc<CylinderData>>>,
}

/// A cofibrantly generated model structure on presheaves over a finite category,
/// together with the knobs of the small object argument.
#[derive(Clone)]
pub struct ModelInstance {
    name: String,
    base: Arc<FinCategory>,
    gen_cof: Vec<PresheafMorphism>,
    gen_triv_cof: Vec<PresheafMorphism>,
    strategy: WeqStrategy,
    oracle: Option<WeqOracle>,
    iteration_cap: usize,
    soa_mode: SoaMode,
    budget: u64,
    all_cofibrant: bool,
    probes: Vec<Arc<Presheaf>>,
    initial: Arc<Presheaf>,
    terminal: Arc<Presheaf>,
    cache: Arc<Cache>,
}

impl fmt::Debug for ModelInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelInstance")
            .field("name", &self.name)
            .field("gen_cof", &self.gen_cof.len())
            .field("gen_triv_cof", &self.gen_triv_cof.len())
            .field("strategy", &self.strategy)
            .field("oracle", &self.oracle.is_some())
            .field("iteration_cap", &self.iteration_cap)
            .field("soa_mode", &self.soa_mode)
            .field("budget", &self.budget)
            .finish()
    }
}

impl ModelInstance {
    pub fn new(
        name: impl Into<String>,
        base: Arc<FinCategory>,
        gen_cof: Vec<PresheafMorphism>,
        gen_triv_cof: Vec<PresheafMorphism>,
    ) -> Result<Self> {
        for g in gen_cof.iter().chain(&gen_triv_cof) {
            if **g.source().category() != *base {
                return Err(Error::ShapeMismatch("generator over a different base category".into()));
            }
        }
        let initial = Arc::new(Presheaf::initial(base.clone()));
        let terminal = Arc::new(Presheaf::terminal(base.clone()));
        Ok(Self {
            name: name.into(),
            base,
            gen_cof,
            gen_triv_cof,
            strategy: WeqStrategy::Oracle,
            oracle: None,
            iteration_cap: DEFAULT_CAP,
            soa_mode: SoaMode::Marked,
            budget: DEFAULT_BUDGET,
            all_cofibrant: false,
            probes: Vec::new(),
            initial,
            terminal,
            cache: Arc::default(),
        })
    }

    pub fn with_oracle(mut self, oracle: WeqOracle) -> Self {
        self.oracle = Some(oracle);
        self
    }

    pub fn with_strategy(mut self, strategy: WeqStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Result<Self> {
        if cap == 0 {
            return Err(Error::OutOfRange("iteration cap must be at least 1".into()));
        }
        self.iteration_cap = cap;
        self.cache = Arc::default();
        Ok(self)
    }

    pub fn with_mode(mut self, mode: SoaMode) -> Self {
        self.soa_mode = mode;
        self.cache = Arc::default();
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self.cache = Arc::default();
        self
    }

    /// Declares every object cofibrant, so cofibrant replacement is the identity.
    pub fn with_all_cofibrant(mut self, yes: bool) -> Self {
        self.all_cofibrant = yes;
        self.cache = Arc::default();
        self
    }

    /// Fibrant objects whose homotopy classes are compared to refute weak equivalences.
    pub fn with_probes(mut self, probes: Vec<Arc<Presheaf>>) -> Self {
        self.probes = probes;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn all_cofibrant(&self) -> bool {
        self.all_cofibrant
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn gen_cof(&self) -> &[PresheafMorphism] {
        &self.gen_cof
    }

    pub fn gen_triv_cof(&self) -> &[PresheafMorphism] {
        &self.gen_triv_cof
    }

    pub fn generators(&self, kind: FactorizationKind) -> &[PresheafMorphism] {
        match kind {
            FactorizationKind::CofTrivFib => &self.gen_cof,
            FactorizationKind::TrivCofFib => &self.gen_triv_cof,
        }
    }

    pub fn strategy(&self) -> WeqStrategy {
        self.strategy
    }

    pub fn iteration_cap(&self) -> usize {
        self.iteration_cap
    }

    pub fn soa_mode(&self) -> SoaMode {
        self.soa_mode
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn probes(&self) -> &[Arc<Presheaf>] {
        &self.probes
    }

    pub fn initial(&self) -> &Arc<Presheaf> {
        &self.initial
    }

    pub fn terminal(&self) -> &Arc<Presheaf> {
        &self.terminal
    }

    pub fn to_terminal(&self, x: &Arc<Presheaf>) -> PresheafMorphism {
        PresheafMorphism::to_terminal(x, &self.terminal)
    }

    fn check_base(&self, x: &Presheaf) -> Result<()> {
        if !Arc::ptr_eq(x.category(), &self.base) && **x.category() != *self.base {
            return Err(Error::ShapeMismatch(format!("object is not over the base category of {}", self.name)));
        }
        Ok(())
    }

    /// One step of the small object argument in the given mode.
    pub fn soa_step(&self, f: &PresheafMorphism, gens: &[PresheafMorphism], mode: SoaMode) -> Result<SoaStep> {
        soa_step(f, gens, mode, self.budget)
    }

    /// Iterates small-object steps until the right leg has the lifting property, or
    /// the cap is reached (`terminated = false`).
    pub fn factorize(&self, f: &PresheafMorphism, kind: FactorizationKind) -> Result<FactorizationTrace> {
        self.check_base(f.source())?;
        let gens = self.generators(kind);
        let a = f.source();
        let mut trace = FactorizationTrace {
            input: f.clone(),
            stages: vec![Stage { object: a.clone(), alpha: PresheafMorphism::identity(a), beta: f.clone() }],
            terminated: false,
            steps_used: 0,
        };
        if self.soa_mode == SoaMode::Naive && has_rlp(f, gens, self.budget)? {
            trace.terminated = true;
            return Ok(trace);
        }
        loop {
            if trace.steps_used == self.iteration_cap {
                trace.terminated = has_rlp(trace.right(), gens, self.budget)?;
                return Ok(trace);
            }
            let mode = if trace.steps_used == 0 { self.soa_mode } else { SoaMode::Marked };
            let step = soa_step(trace.right(), gens, mode, self.budget)?;
            if step.cells == 0 {
                trace.terminated = true;
                return Ok(trace);
            }
            let alpha = trace.left().then(&step.alpha)?;
            trace.stages.push(Stage { object: step.beta.source().clone(), alpha, beta: step.beta });
            trace.steps_used += 1;
        }
    }

    pub(crate) fn factorize_or_fail(&self, f: &PresheafMorphism, kind: FactorizationKind) -> Result<FactorizationTrace> {
        let trace = self.factorize(f, kind)?;
        if !trace.terminated {
            return Err(Error::CapExhausted { cap: self.iteration_cap, trace: Box::new(trace) });
        }
        Ok(trace)
    }

    /// `QX` with `q: QX -> X`.
    pub fn cofibrant_replacement(&self, x: &Arc<Presheaf>) -> Result<Arc<Replacement>> {
        self.check_base(x)?;
        if let Some(r) = self.cache.cofibrant.lock().unwrap().get(&**x) {
            return Ok(r.clone());
        }
        let r = if self.all_cofibrant {
            Replacement { object: x.clone(), comparison: PresheafMorphism::identity(x) }
        } else {
            let t = self.factorize_or_fail(&PresheafMorphism::from_initial(x), FactorizationKind::CofTrivFib)?;
            Replacement { object: t.middle().clone(), comparison: t.right().clone() }
        };
        let r = Arc::new(r);
        self.cache.cofibrant.lock().unwrap().insert((**x).clone(), r.clone());
        Ok(r)
    }

    /// `R_f X` with `v: X -> R_f X`.
    pub fn fibrant_replacement(&self, x: &Arc<Presheaf>) -> Result<Arc<Replacement>> {
        self.check_base(x)?;
        if let Some(r) = self.cache.fibrant.lock().unwrap().get(&**x) {
            return Ok(r.clone());
        }
        let t = self.factorize_or_fail(&self.to_terminal(x), FactorizationKind::TrivCofFib)?;
        let r = Arc::new(Replacement { object: t.middle().clone(), comparison: t.left().clone() });
        self.cache.fibrant.lock().unwrap().insert((**x).clone(), r.clone());
        Ok(r)
    }

    /// `RX = R_f(QX)` with `v: QX -> RX`.
    pub fn full_replacement(&self, x: &Arc<Presheaf>) -> Result<Arc<Replacement>> {
        let q = self.cofibrant_replacement(x)?;
        self.fibrant_replacement(&q.object)
    }

    pub fn replacement(&self, x: &Arc<Presheaf>, which: ReplacementKind) -> Result<Arc<Replacement>> {
        match which {
            ReplacementKind::Cofibrant => self.cofibrant_replacement(x),
            ReplacementKind::Fibrant => self.fibrant_replacement(x),
            ReplacementKind::Full => self.full_replacement(x),
        }
    }

    /// `Q(f): QX -> QY`, lifting `f∘q_X` through the trivial fibration `q_Y`.
    pub fn cofibrant_lift(&self, f: &PresheafMorphism) -> Result<PresheafMorphism> {
        let qx = self.cofibrant_replacement(f.source())?;
        let qy = self.cofibrant_replacement(f.target())?;
        if self.all_cofibrant {
            return Ok(f.clone());
        }
        let bottom = qx.comparison.then(f)?;
        let left = PresheafMorphism::from_initial(&qx.object);
        let top = PresheafMorphism::from_initial(&qy.object);
        lift_square(&left, &qy.comparison, &top, &bottom, self.budget)?
            .ok_or_else(|| Error::Precondition("cofibrant replacement map is not a trivial fibration".into()))
    }

    /// Extends `g: A -> Z` along the trivial cofibration `v: A -> R_f A`, for fibrant `Z`.
    pub fn extend_along_fibrant(&self, g: &PresheafMorphism) -> Result<PresheafMorphism> {
        let r = self.fibrant_replacement(g.source())?;
        let z = g.target();
        let bottom = self.to_terminal(&r.object);
        lift_square(&r.comparison, &self.to_terminal(z), g, &bottom, self.budget)?
            .ok_or_else(|| Error::Precondition("target of the extension is not fibrant".into()))
    }

    /// `R(f): RX -> RY`.
    pub fn replace_morphism(&self, f: &PresheafMorphism) -> Result<PresheafMorphism> {
        let qf = self.cofibrant_lift(f)?;
        let ry = self.fibrant_replacement(qf.target())?;
        self.extend_along_fibrant(&qf.then(&ry.comparison)?)
    }

    /// The cylinder of `k`, factoring the codiagonal as (cofibration, trivial fibration).
    pub fn cylinder(&self, k: &Arc<Presheaf>) -> Result<Arc<CylinderData>> {
        self.check_base(k)?;
        if let Some(c) = self.cache.cylinders.lock().unwrap().get(&**k) {
            return Ok(c.clone());
        }
        let sum = coproduct(&[k.clone(), k.clone()], &self.base)?;
        let id = PresheafMorphism::identity(k);
        let nabla = sum.induced(k, &[id.clone(), id])?;
        let t = self.factorize_or_fail(&nabla, FactorizationKind::CofTrivFib)?;
        let gamma = t.left().clone();
        let c = Arc::new(CylinderData {
            object: t.middle().clone(),
            gamma1: sum.legs[0].then(&gamma)?,
            gamma2: sum.legs[1].then(&gamma)?,
            gamma,
            sigma: t.right().clone(),
        });
        self.cache.cylinders.lock().unwrap().insert((**k).clone(), c.clone());
        Ok(c)
    }

    /// A left homotopy `h: C(K) -> L` from `f` to `g`, if one exists. The shared source
    /// must be cofibrant and the target fibrant.
    pub fn left_homotopy(&self, f: &PresheafMorphism, g: &PresheafMorphism) -> Result<Option<PresheafMorphism>> {
        if *f.source() != *g.source() || *f.target() != *g.target() {
            return Err(Error::ShapeMismatch("left homotopy between non-parallel maps".into()));
        }
        if f == g {
            let c = self.cylinder(f.source())?;
            return Ok(Some(c.sigma.then(f)?));
        }
        let c = self.cylinder(f.source())?;
        let l = f.target();
        MapSearch::new(&c.object, l)
            .fix_along(&c.gamma1, f)
            .fix_along(&c.gamma2, g)
            .first(&c.object, l, self.budget)
    }

    pub fn left_homotopic(&self, f: &PresheafMorphism, g: &PresheafMorphism) -> Result<bool> {
        Ok(self.left_homotopy(f, g)?.is_some())
    }

    /// Canonical representatives of the left-homotopy classes of maps `x -> y`: the
    /// first map of each class in enumeration order. `x` cofibrant, `y` fibrant.
    pub fn homotopy_classes(&self, x: &Arc<Presheaf>, y: &Arc<Presheaf>) -> Result<Vec<PresheafMorphism>> {
        let mut reps: Vec<PresheafMorphism> = Vec::new();
        for m in enumerate_maps(x, y, self.budget)? {
            if self.class_index(&reps, &m)?.is_none() {
                reps.push(m);
            }
        }
        Ok(reps)
    }

    /// Index of the representative homotopic to `m`, if any.
    pub fn class_index(&self, reps: &[PresheafMorphism], m: &PresheafMorphism) -> Result<Option<usize>> {
        for (i, r) in reps.iter().enumerate() {
            if self.left_homotopic(r, m)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Whether precomposition with `f: X -> Y` is a bijection `[QY, Z] -> [QX, Z]` for
    /// every probe `Z`. Returns the first probe index where it is not.
    pub fn probe_refutation(&self, f: &PresheafMorphism) -> Result<Option<usize>> {
        if self.probes.is_empty() {
            return Ok(None);
        }
        let qf = self.cofibrant_lift(f)?;
        for (i, z) in self.probes.iter().enumerate() {
            let on_y = self.homotopy_classes(qf.target(), z)?;
            let on_x = self.homotopy_classes(qf.source(), z)?;
            if on_x.len() != on_y.len() {
                return Ok(Some(i));
            }
            let mut hit = vec![false; on_x.len()];
            for h in &on_y {
                let Some(j) = self.class_index(&on_x, &qf.then(h)?)? else {
                    return Err(Error::Precondition("probe classes are not exhaustive".into()));
                };
                if std::mem::replace(&mut hit[j], true) {
                    return Ok(Some(i));
                }
            }
        }
        Ok(None)
    }

    /// Number of homotopy classes `[QX, Z]` for each probe `Z`.
    pub fn probe_signature(&self, x: &Arc<Presheaf>) -> Result<Vec<usize>> {
        let q = self.cofibrant_replacement(x)?;
        self.probes.iter().map(|z| Ok(self.homotopy_classes(&q.object, z)?.len())).collect()
    }

    pub fn is_weak_equivalence(&self, f: &PresheafMorphism) -> Result<bool> {
        match (&self.strategy, &self.oracle) {
            (WeqStrategy::Oracle, Some(oracle)) => oracle(f),
            _ => self.is_weak_equivalence_by_search(f),
        }
    }

    /// Decides `f` by refutation against the probes, then by searching for a homotopy
    /// inverse of `R(f)` between fibrant-cofibrant replacements.
    pub fn is_weak_equivalence_by_search(&self, f: &PresheafMorphism) -> Result<bool> {
        if f.is_iso() {
            return Ok(true);
        }
        if self.probe_refutation(f)?.is_some() {
            return Ok(false);
        }
        let rf = self.replace_morphism(f)?;
        Ok(self.homotopy_inverse(&rf)?.is_some())
    }

    /// A homotopy inverse of `f` between fibrant-cofibrant objects.
    pub fn homotopy_inverse(&self, f: &PresheafMorphism) -> Result<Option<PresheafMorphism>> {
        let (x, y) = (f.source(), f.target());
        let id_x = PresheafMorphism::identity(x);
        let id_y = PresheafMorphism::identity(y);
        for g in self.homotopy_classes(y, x)? {
            if self.left_homotopic(&f.then(&g)?, &id_x)? && self.left_homotopic(&g.then(f)?, &id_y)? {
                return Ok(Some(g));
            }
        }
        Ok(None)
    }

    /// Whether `x` and `y` are weakly equivalent, with a homotopy equivalence between
    /// their full replacements as witness.
    pub fn weakly_equivalent_objects(&self, x: &Arc<Presheaf>, y: &Arc<Presheaf>) -> Result<Option<HomotopyEquivalence>> {
        if let Some(iso) = find_isomorphism(x, y, self.budget)? {
            let back = inverse(&iso);
            return Ok(Some(HomotopyEquivalence { forward: iso, backward: back }));
        }
        if !self.probes.is_empty() && self.probe_signature(x)? != self.probe_signature(y)? {
            return Ok(None);
        }
        let rx = self.full_replacement(x)?;
        let ry = self.full_replacement(y)?;
        let (rx, ry) = (&rx.object, &ry.object);
        let id_x = PresheafMorphism::identity(rx);
        let id_y = PresheafMorphism::identity(ry);
        let backs = self.homotopy_classes(ry, rx)?;
        for phi in self.homotopy_classes(rx, ry)? {
            for psi in &backs {
                if self.left_homotopic(&phi.then(psi)?, &id_x)? && self.left_homotopic(&psi.then(&phi)?, &id_y)? {
                    return Ok(Some(HomotopyEquivalence { forward: phi, backward: psi.clone() }));
                }
            }
        }
        Ok(None)
    }
}

/// Inverse of a componentwise bijection.
pub fn inverse(iso: &PresheafMorphism) -> PresheafMorphism {
    let comps = iso
        .components()
        .iter()
        .map(|c| {
            let mut inv = vec![0; c.len()];
            for (x, &y) in c.iter().enumerate() {
                inv[y] = x;
            }
            inv
        })
        .collect();
    PresheafMorphism::new_unchecked(iso.target().clone(), iso.source().clone(), comps).expect("bijection")
}

/// One small-object step on `f: A -> B` against `gens`.
///
/// Spans are visited by generator, then by top map `u` in canonical order. In naive
/// mode every `(h, u)` admitting a bottom map gets one cell, glued along the first
/// bottom map. In marked mode each bottom map `v` is tried in order and a cell is glued
/// only when the square `(h, u, v)` has no lift through the stage built so far.
pub fn soa_step(f: &PresheafMorphism, gens: &[PresheafMorphism], mode: SoaMode, budget: u64) -> Result<SoaStep> {
    let a = f.source();
    let mut alpha = PresheafMorphism::identity(a);
    let mut beta = f.clone();
    let mut cells = 0;
    for gen in gens {
        if !gen.source().same_category(a) {
            return Err(Error::ShapeMismatch("generator over a different category".into()));
        }
        for u in enumerate_maps(gen.source(), a, budget)? {
            let mut bottoms = Vec::new();
            let naive = mode == SoaMode::Naive;
            bottoms_for(gen, f, &u, budget, &mut |v| {
                bottoms.push(v);
                !naive
            })?;
            for v in bottoms {
                let top = u.then(&alpha)?;
                if mode == SoaMode::Marked && lift_square(gen, &beta, &top, &v, budget)?.is_some() {
                    continue;
                }
                let p = pushout(&top, gen)?;
                let b = f.target();
                beta = p.induced(b, &[beta.clone(), v])?;
                alpha = alpha.then(&p.legs[0])?;
                cells += 1;
            }
        }
    }
    Ok(SoaStep { alpha, beta, cells })
}
