use std::cell::RefCell;
use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Configuration, RuleParams};
use crate::error::RuleError;
use crate::geometry::{boundary, horizontal_doglegs, neighbourhood, Letter, ReducedWord, TreePath, VertexSet};

/// The zero set inside a radius-`rho` ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalView {
    Empty,
    NotPath,
    /// Ordered from one end to the other.
    Path(Vec<ReducedWord>),
}

impl LocalView {
    pub fn path(&self) -> Option<&[ReducedWord]> {
        match self {
            LocalView::Path(v) => Some(v),
            _ => None,
        }
    }

    fn position(&self, v: &ReducedWord) -> Option<(usize, usize)> {
        let path = self.path()?;
        path.iter().position(|x| x == v).map(|i| (i, path.len()))
    }

    pub fn contains(&self, v: &ReducedWord) -> bool {
        self.position(v).is_some()
    }

    pub fn is_interior(&self, v: &ReducedWord) -> bool {
        matches!(self.position(v), Some((i, n)) if i > 0 && i + 1 < n)
    }

    pub fn is_endpoint(&self, v: &ReducedWord) -> bool {
        matches!(self.position(v), Some((i, n)) if i == 0 || i + 1 == n)
    }

    /// Path neighbours of `v`, in path order.
    pub fn neighbours_of(&self, v: &ReducedWord) -> Vec<ReducedWord> {
        let Some((i, n)) = self.position(v) else {
            return Vec::new();
        };
        let path = self.path().expect("position implies path");
        let mut out = Vec::new();
        if i > 0 {
            out.push(path[i - 1].clone());
        }
        if i + 1 < n {
            out.push(path[i + 1].clone());
        }
        out
    }
}

/// One `E` component: `B(central, 1)` minus the excluded boundary points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentInfo {
    pub vertices: VertexSet,
    pub central: TreePath,
    pub excluded: VertexSet,
}

/// Evaluates the local rules of one configuration at arbitrary vertices.
///
/// "At `g`" always means: applied to the configuration seen from `g`, so the
/// neighbour in direction `s` is `g * s`.
pub struct RuleEngine<'a> {
    cfg: &'a Configuration,
    params: &'a RuleParams,
    views: RefCell<HashMap<ReducedWord, Rc<LocalView>>>,
    clean: RefCell<HashMap<ReducedWord, bool>>,
    good: RefCell<HashMap<ReducedWord, bool>>,
    in_e: RefCell<HashMap<ReducedWord, bool>>,
    in_w: RefCell<HashMap<ReducedWord, bool>>,
}

impl<'a> RuleEngine<'a> {
    pub fn new(cfg: &'a Configuration, params: &'a RuleParams) -> Self {
        RuleEngine {
            cfg,
            params,
            views: RefCell::default(),
            clean: RefCell::default(),
            good: RefCell::default(),
            in_e: RefCell::default(),
            in_w: RefCell::default(),
        }
    }

    pub fn config(&self) -> &Configuration {
        self.cfg
    }

    pub fn params(&self) -> &RuleParams {
        self.params
    }

    fn rho(&self) -> usize {
        self.params.rho as usize
    }

    pub fn view(&self, at: &ReducedWord) -> Result<Rc<LocalView>, RuleError> {
        if let Some(v) = self.views.borrow().get(at) {
            return Ok(v.clone());
        }
        self.cfg.require(at, self.rho())?;
        let zeros = self.cfg.zeros_near(at, self.rho());
        let view = if zeros.is_empty() {
            LocalView::Empty
        } else {
            match TreePath::from_vertex_set(&zeros) {
                Ok(p) => LocalView::Path(p.vertices()),
                Err(_) => LocalView::NotPath,
            }
        };
        let view = Rc::new(view);
        self.views.borrow_mut().insert(at.clone(), view.clone());
        Ok(view)
    }

    /// The view is a path with no short dogleg whose main segment lies in
    /// `B(at, rho - 1)`.
    pub fn is_clean(&self, at: &ReducedWord) -> Result<bool, RuleError> {
        if let Some(&c) = self.clean.borrow().get(at) {
            return Ok(c);
        }
        let view = self.view(at)?;
        let clean = match view.path() {
            None => false,
            Some(path) => !has_visible_dogleg(path, at, self.params.dogleg_bound as usize, self.rho()),
        };
        self.clean.borrow_mut().insert(at.clone(), clean);
        Ok(clean)
    }

    pub fn is_locally_good(&self, at: &ReducedWord) -> Result<bool, RuleError> {
        if let Some(&g) = self.good.borrow().get(at) {
            return Ok(g);
        }
        self.cfg.require(at, 2 * self.rho())?;
        let good = self.locally_good_uncached(at)?;
        self.good.borrow_mut().insert(at.clone(), good);
        Ok(good)
    }

    fn locally_good_uncached(&self, at: &ReducedWord) -> Result<bool, RuleError> {
        let view = self.view(at)?;
        let Some(path) = view.path() else {
            return Ok(false);
        };
        if !path.contains(at) || !path.iter().any(|v| v.distance(at) == self.rho()) {
            return Ok(false);
        }
        for h in path {
            if !self.is_clean(h)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The four-case auxiliary weight for direction `s` at `at`.
    pub fn f_circ(&self, s: Letter, at: &ReducedWord) -> Result<BigRational, RuleError> {
        self.cfg.require(at, 2 * self.rho() + 1)?;
        let next = at.mul_letter(s);
        if self.is_locally_good(at)? {
            let view = self.view(at)?;
            if view.is_interior(at) && view.is_interior(&next) {
                return Ok(BigRational::one());
            }
            if view.is_interior(at) && view.is_endpoint(&next) {
                return Ok(BigRational::from_integer(2.into()));
            }
            let sideways = Letter::ALL
                .into_iter()
                .filter(|&t| t != s && t != s.inverse())
                .any(|t| view.contains(&at.mul_letter(t)));
            if view.contains(at) && sideways && !view.contains(&next) {
                return Ok(BigRational::from_integer(2.into()));
            }
            return Ok(BigRational::zero());
        }
        if self.cfg.is_zero(at) && self.is_locally_good(&next)? {
            self.check_unique_bad_witness(at)?;
            return Ok(self.params.bad_weight.clone());
        }
        Ok(BigRational::zero())
    }

    /// Directions `s` for which the 1/100 case fires at `at`.
    pub fn bad_weight_witnesses(&self, at: &ReducedWord) -> Result<Vec<Letter>, RuleError> {
        if !self.cfg.is_zero(at) || self.is_locally_good(at)? {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for s in Letter::ALL {
            if self.is_locally_good(&at.mul_letter(s))? {
                out.push(s);
            }
        }
        Ok(out)
    }

    /// At most one witness, except when the view is a clean path through
    /// `at` that only fails to reach distance `rho`: a zero path of exactly
    /// `2 rho - 1` vertices has two good neighbours of its bad middle.
    fn check_unique_bad_witness(&self, at: &ReducedWord) -> Result<(), RuleError> {
        let witnesses = self.bad_weight_witnesses(at)?;
        if witnesses.len() <= 1 || self.is_short_bridge(at)? {
            return Ok(());
        }
        Err(RuleError::RuleViolation(format!(
            "bad-weight case fires in {} directions at {at}",
            witnesses.len()
        )))
    }

    fn is_short_bridge(&self, at: &ReducedWord) -> Result<bool, RuleError> {
        let view = self.view(at)?;
        Ok(self.is_clean(at)?
            && view.is_interior(at)
            && view.path().is_some_and(|p| p.iter().all(|v| v.distance(at) < self.rho())))
    }

    /// Membership of `at` in the support set `E`.
    pub fn in_e(&self, at: &ReducedWord) -> Result<bool, RuleError> {
        if let Some(&b) = self.in_e.borrow().get(at) {
            return Ok(b);
        }
        self.cfg.require(at, 2 * self.rho() + 2)?;
        let near_zero = self.cfg.is_zero(at) || at.neighbours().iter().any(|n| self.cfg.is_zero(n));
        let mut inside = false;
        if near_zero {
            for s in Letter::ALL {
                if !self.f_circ(s, at)?.is_zero() || !self.f_circ(s.inverse(), &at.mul_letter(s))?.is_zero() {
                    inside = true;
                    break;
                }
            }
        }
        self.in_e.borrow_mut().insert(at.clone(), inside);
        Ok(inside)
    }

    /// Locally good vertices of a component, plus any bad vertex bridging
    /// two good neighbours.
    fn is_central(&self, at: &ReducedWord) -> Result<bool, RuleError> {
        Ok(self.is_locally_good(at)? || self.bad_weight_witnesses(at)?.len() >= 2)
    }

    /// `at` is in `E` and the central path next to it has at least
    /// `min_central_vertices` vertices.
    pub fn in_w(&self, at: &ReducedWord) -> Result<bool, RuleError> {
        if let Some(&b) = self.in_w.borrow().get(at) {
            return Ok(b);
        }
        let result = self.in_e(at)? && self.central_count_at_least(at, self.params.min_central_vertices)?;
        self.in_w.borrow_mut().insert(at.clone(), result);
        Ok(result)
    }

    fn central_count_at_least(&self, at: &ReducedWord, k: usize) -> Result<bool, RuleError> {
        let mut seen = VertexSet::new();
        let mut queue = VecDeque::new();
        for v in std::iter::once(at.clone()).chain(at.neighbours()) {
            if self.is_central(&v)? && seen.insert(v.clone()) {
                queue.push_back(v);
            }
        }
        if seen.len() >= k {
            return Ok(true);
        }
        while let Some(v) = queue.pop_front() {
            for n in v.neighbours() {
                if !seen.contains(&n) && self.cfg.is_zero(&n) && self.is_central(&n)? {
                    seen.insert(n.clone());
                    if seen.len() >= k {
                        return Ok(true);
                    }
                    queue.push_back(n);
                }
            }
        }
        Ok(false)
    }

    pub fn f_s(&self, s: Letter, at: &ReducedWord) -> Result<BigRational, RuleError> {
        let value = self.f_circ(s, at)?;
        if value.is_zero() || !self.in_w(at)? {
            return Ok(BigRational::zero());
        }
        Ok(value)
    }

    pub fn g_s(&self, s: Letter, at: &ReducedWord) -> Result<BigRational, RuleError> {
        self.f_s(s.inverse(), at)
    }

    /// Symmetric weight of the edge `{g, g s}`.
    pub fn edge_weight(&self, g: &ReducedWord, s: Letter) -> Result<BigRational, RuleError> {
        let h = g.mul_letter(s);
        Ok(self.f_s(s, g)? + self.f_s(s.inverse(), &h)?)
    }

    /// Whether every `F_s` and every `F_{s^{-1}}` at the neighbour vanishes.
    pub fn is_inert(&self, at: &ReducedWord) -> Result<bool, RuleError> {
        for s in Letter::ALL {
            if !self.f_s(s, at)?.is_zero() || !self.f_s(s.inverse(), &at.mul_letter(s))?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `E` split into the pieces `B(P,1)` minus at most two boundary points
    /// next to the ends of `P`, one per central path `P`.
    ///
    /// Pieces of different paths are at distance at least `rho - 1`; for
    /// `rho = 2` that lets them touch, so grouping is by central path rather
    /// than by Cayley-graph connectivity.
    pub fn components_e(&self) -> Result<Vec<ComponentInfo>, RuleError> {
        let zeros = self.cfg.zeros().clone();
        let mut members = VertexSet::new();
        for c in &neighbourhood(&zeros, 1) {
            if self.in_e(c)? {
                members.insert(c.clone());
            }
        }
        let mut central = VertexSet::new();
        for v in &members {
            if self.is_central(v)? {
                central.insert(v.clone());
            }
        }
        let mut clusters: Vec<VertexSet> = Vec::new();
        let mut assigned = VertexSet::new();
        for start in &central {
            if assigned.contains(start) {
                continue;
            }
            let mut cluster = VertexSet::new();
            cluster.insert(start.clone());
            let mut queue = VecDeque::from([start.clone()]);
            while let Some(v) = queue.pop_front() {
                for n in v.neighbours() {
                    if central.contains(&n) && cluster.insert(n.clone()) {
                        queue.push_back(n);
                    }
                }
            }
            assigned.extend(cluster.iter().cloned());
            clusters.push(cluster);
        }
        let mut pieces: Vec<VertexSet> = vec![VertexSet::new(); clusters.len()];
        for v in &members {
            let owners: Vec<usize> = (0..clusters.len())
                .filter(|&i| {
                    clusters[i].contains(v) || v.neighbours().iter().any(|n| clusters[i].contains(n))
                })
                .collect();
            match owners.as_slice() {
                [i] => {
                    pieces[*i].insert(v.clone());
                }
                _ => {
                    return Err(RuleError::MalformedComponent(format!(
                        "{v} is next to {} central paths",
                        owners.len()
                    )))
                }
            }
        }
        clusters.into_iter().zip(pieces).map(|(c, p)| self.describe_component(c, p)).collect()
    }

    fn describe_component(&self, central: VertexSet, comp: VertexSet) -> Result<ComponentInfo, RuleError> {
        let malformed = |m: &str| RuleError::MalformedComponent(format!("{m} (component of {} vertices)", comp.len()));
        let path = TreePath::from_vertex_set(&central).map_err(|_| malformed("central vertices are not a path"))?;
        let ball = neighbourhood(&central, 1);
        if !comp.is_subset(&ball) {
            return Err(malformed("component leaves the 1-neighbourhood of its central path"));
        }
        let excluded: VertexSet = ball.difference(&comp).cloned().collect();
        let ends: Vec<ReducedWord> = vec![path.base().clone(), path.last()];
        let end_boundary: VertexSet = boundary(&central)
            .into_iter()
            .filter(|b| ends.iter().any(|e| e.distance(b) == 1))
            .collect();
        if excluded.len() > 2 || !excluded.is_subset(&end_boundary) {
            return Err(malformed("excluded set is not made of end-point neighbours"));
        }
        Ok(ComponentInfo { vertices: comp, central: path, excluded })
    }
}

fn has_visible_dogleg(path: &[ReducedWord], at: &ReducedWord, max_run: usize, rho: usize) -> bool {
    let steps: Vec<Letter> = path.windows(2).map(|w| w[0].step_to(&w[1]).expect("consecutive")).collect();
    horizontal_doglegs(&steps, max_run).into_iter().any(|d| {
        path[d.start..=d.start + d.run_len].iter().all(|v| v.distance(at) + 1 <= rho)
    })
}
