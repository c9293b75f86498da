//! Reduced ordered binary decision diagrams.
//!
//! Nodes live in a [`BddManager`] with a fixed variable order (variable `0`
//! is the root-most level). There are no complement edges; the two terminals
//! are nodes `0` (false) and `1` (true). Every node is hash-consed through
//! the unique table, so two handles of one manager denote the same function
//! iff they are equal. Nodes are never freed; a node cap turns blowups into
//! [`BddError::NodeLimit`].

mod circuit;

pub use circuit::{from_circuit, CircuitBdds, VarLayout};

use rustc_hash::{FxHashMap as HashMap, FxHashSet};
use std::sync::atomic::{AtomicU32, Ordering};
use std::time::Instant;

use thiserror::Error;

/// Default cap on the number of nodes of one manager.
pub const DEFAULT_NODE_CAP: usize = 1 << 22;

const FALSE: u32 = 0;
const TRUE: u32 = 1;
const TERMINAL_VAR: u32 = u32::MAX;

static NEXT_MANAGER: AtomicU32 = AtomicU32::new(0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BddError {
    #[error("BDD node limit of {0} nodes exceeded")]
    NodeLimit(usize),
    #[error("time limit exceeded")]
    Timeout,
    #[error("BDD handle used with a different manager")]
    ManagerMismatch,
    #[error("BDD variable {0} is out of range")]
    UnknownVariable(u32),
}

pub type BddResult<T> = Result<T, BddError>;

/// Position of a variable in the order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BddVar(pub u32);

/// Handle to a function stored in a manager.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BddRef {
    manager: u32,
    node: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    var: u32,
    low: u32,
    high: u32,
}

/// Lossy direct-mapped cache of ite results. Sized to the node count, up
/// to a fixed maximum.
struct IteCache {
    slots: Vec<[u32; 4]>,
}

const EMPTY_SLOT: [u32; 4] = [u32::MAX; 4];
const MIN_CACHE: usize = 1 << 12;
const MAX_CACHE: usize = 1 << 21;

impl IteCache {
    fn new() -> Self {
        IteCache {
            slots: vec![EMPTY_SLOT; MIN_CACHE],
        }
    }

    fn slot(&self, f: u32, g: u32, h: u32) -> usize {
        let x = (f as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
            ^ (g as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
            ^ (h as u64).wrapping_mul(0x1656_67B1_9E37_79F9);
        (x >> 32) as usize & (self.slots.len() - 1)
    }

    fn get(&self, f: u32, g: u32, h: u32) -> Option<u32> {
        let [sf, sg, sh, r] = self.slots[self.slot(f, g, h)];
        (sf == f && sg == g && sh == h).then_some(r)
    }

    fn insert(&mut self, f: u32, g: u32, h: u32, r: u32) {
        let k = self.slot(f, g, h);
        self.slots[k] = [f, g, h, r];
    }

    /// Doubles the table while it is smaller than `nodes`, dropping entries.
    fn fit(&mut self, nodes: usize) {
        if nodes > self.slots.len() && self.slots.len() < MAX_CACHE {
            let len = (self.slots.len() * 2).min(MAX_CACHE);
            self.slots = vec![EMPTY_SLOT; len];
        }
    }

    fn clear(&mut self) {
        self.slots.fill(EMPTY_SLOT);
    }
}

pub struct BddManager {
    id: u32,
    num_vars: u32,
    nodes: Vec<Node>,
    unique: HashMap<Node, u32>,
    ite_cache: IteCache,
    node_cap: usize,
    deadline: Option<Instant>,
    created: u64,
}

impl std::fmt::Debug for BddManager {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BddManager")
            .field("id", &self.id)
            .field("num_vars", &self.num_vars)
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

impl BddManager {
    pub fn new(num_vars: u32) -> Self {
        let terminal = |value| Node {
            var: TERMINAL_VAR,
            low: value,
            high: value,
        };
        BddManager {
            id: NEXT_MANAGER.fetch_add(1, Ordering::Relaxed),
            num_vars,
            nodes: vec![terminal(FALSE), terminal(TRUE)],
            unique: HashMap::default(),
            ite_cache: IteCache::new(),
            node_cap: DEFAULT_NODE_CAP,
            deadline: None,
            created: 0,
        }
    }

    pub fn with_node_cap(mut self, cap: usize) -> Self {
        self.node_cap = cap;
        self
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = deadline;
        self
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    /// Nodes allocated so far, terminals included.
    pub fn allocated(&self) -> usize {
        self.nodes.len()
    }

    pub fn clear_caches(&mut self) {
        self.ite_cache.clear();
    }

    fn handle(&self, node: u32) -> BddRef {
        BddRef {
            manager: self.id,
            node,
        }
    }

    fn id_of(&self, f: BddRef) -> BddResult<u32> {
        if f.manager == self.id {
            Ok(f.node)
        } else {
            Err(BddError::ManagerMismatch)
        }
    }

    fn check_var(&self, var: BddVar) -> BddResult<()> {
        if var.0 < self.num_vars {
            Ok(())
        } else {
            Err(BddError::UnknownVariable(var.0))
        }
    }

    pub fn zero(&self) -> BddRef {
        self.handle(FALSE)
    }

    pub fn one(&self) -> BddRef {
        self.handle(TRUE)
    }

    pub fn constant(&self, value: bool) -> BddRef {
        self.handle(value as u32)
    }

    pub fn is_zero(&self, f: BddRef) -> bool {
        f == self.zero()
    }

    pub fn is_one(&self, f: BddRef) -> bool {
        f == self.one()
    }

    pub fn var(&mut self, var: BddVar) -> BddResult<BddRef> {
        self.check_var(var)?;
        let n = self.mk(var.0, FALSE, TRUE)?;
        Ok(self.handle(n))
    }

    pub fn nvar(&mut self, var: BddVar) -> BddResult<BddRef> {
        self.check_var(var)?;
        let n = self.mk(var.0, TRUE, FALSE)?;
        Ok(self.handle(n))
    }

    /// Top variable and the `(low, high)` children, or `None` for a
    /// terminal.
    pub fn decompose(&self, f: BddRef) -> BddResult<Option<(BddVar, BddRef, BddRef)>> {
        let n = self.nodes[self.id_of(f)? as usize];
        Ok((n.var != TERMINAL_VAR)
            .then(|| (BddVar(n.var), self.handle(n.low), self.handle(n.high))))
    }

    fn mk(&mut self, var: u32, low: u32, high: u32) -> BddResult<u32> {
        if low == high {
            return Ok(low);
        }
        let node = Node { var, low, high };
        if let Some(&n) = self.unique.get(&node) {
            return Ok(n);
        }
        if self.nodes.len() >= self.node_cap {
            return Err(BddError::NodeLimit(self.node_cap));
        }
        self.created += 1;
        if self.created.is_multiple_of(1024) {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    return Err(BddError::Timeout);
                }
            }
        }
        let n = self.nodes.len() as u32;
        self.nodes.push(node);
        self.unique.insert(node, n);
        self.ite_cache.fit(self.nodes.len());
        Ok(n)
    }

    fn level(&self, n: u32) -> u32 {
        self.nodes[n as usize].var
    }

    fn cofactors(&self, n: u32, var: u32) -> (u32, u32) {
        let node = self.nodes[n as usize];
        if node.var == var {
            (node.low, node.high)
        } else {
            (n, n)
        }
    }

    pub fn ite(&mut self, f: BddRef, g: BddRef, h: BddRef) -> BddResult<BddRef> {
        let (f, g, h) = (self.id_of(f)?, self.id_of(g)?, self.id_of(h)?);
        let r = self.ite_rec(f, g, h)?;
        Ok(self.handle(r))
    }

    fn ite_rec(&mut self, f: u32, g: u32, h: u32) -> BddResult<u32> {
        if f == TRUE {
            return Ok(g);
        }
        if f == FALSE {
            return Ok(h);
        }
        let g = if g == f { TRUE } else { g };
        let h = if h == f { FALSE } else { h };
        if g == h {
            return Ok(g);
        }
        if g == TRUE && h == FALSE {
            return Ok(f);
        }
        if let Some(r) = self.ite_cache.get(f, g, h) {
            return Ok(r);
        }
        let top = self.level(f).min(self.level(g)).min(self.level(h));
        let (f0, f1) = self.cofactors(f, top);
        let (g0, g1) = self.cofactors(g, top);
        let (h0, h1) = self.cofactors(h, top);
        let low = self.ite_rec(f0, g0, h0)?;
        let high = self.ite_rec(f1, g1, h1)?;
        let r = self.mk(top, low, high)?;
        self.ite_cache.insert(f, g, h, r);
        Ok(r)
    }

    pub fn not(&mut self, f: BddRef) -> BddResult<BddRef> {
        let (zero, one) = (self.zero(), self.one());
        self.ite(f, zero, one)
    }

    pub fn and(&mut self, f: BddRef, g: BddRef) -> BddResult<BddRef> {
        let zero = self.zero();
        self.ite(f, g, zero)
    }

    pub fn or(&mut self, f: BddRef, g: BddRef) -> BddResult<BddRef> {
        let one = self.one();
        self.ite(f, one, g)
    }

    pub fn xor(&mut self, f: BddRef, g: BddRef) -> BddResult<BddRef> {
        let ng = self.not(g)?;
        self.ite(f, ng, g)
    }

    pub fn xnor(&mut self, f: BddRef, g: BddRef) -> BddResult<BddRef> {
        let ng = self.not(g)?;
        self.ite(f, g, ng)
    }

    pub fn implies(&mut self, f: BddRef, g: BddRef) -> BddResult<BddRef> {
        let one = self.one();
        self.ite(f, g, one)
    }

    pub fn and_all(&mut self, fs: impl IntoIterator<Item = BddRef>) -> BddResult<BddRef> {
        let mut acc = self.one();
        for f in fs {
            acc = self.and(acc, f)?;
        }
        Ok(acc)
    }

    /// `f` implies `g`.
    pub fn leq(&mut self, f: BddRef, g: BddRef) -> BddResult<bool> {
        let imp = self.implies(f, g)?;
        Ok(self.is_one(imp))
    }

    /// Cofactor of `f` with `var` fixed to `value`.
    pub fn restrict(&mut self, f: BddRef, var: BddVar, value: bool) -> BddResult<BddRef> {
        self.check_var(var)?;
        let v = if value { self.one() } else { self.zero() };
        self.compose(f, &[(var, v)])
    }

    fn var_mask(&self, vars: &[BddVar]) -> BddResult<Vec<bool>> {
        let mut mask = vec![false; self.num_vars as usize];
        for &v in vars {
            self.check_var(v)?;
            mask[v.0 as usize] = true;
        }
        Ok(mask)
    }

    pub fn exists(&mut self, vars: &[BddVar], f: BddRef) -> BddResult<BddRef> {
        let mask = self.var_mask(vars)?;
        let f = self.id_of(f)?;
        let last = mask.iter().rposition(|&b| b).map_or(0, |p| p as u32 + 1);
        let mut memo = HashMap::default();
        let r = self.exists_rec(f, &mask, last, &mut memo)?;
        Ok(self.handle(r))
    }

    fn exists_rec(
        &mut self,
        f: u32,
        mask: &[bool],
        last: u32,
        memo: &mut HashMap<u32, u32>,
    ) -> BddResult<u32> {
        let node = self.nodes[f as usize];
        if node.var == TERMINAL_VAR || node.var >= last {
            return Ok(f);
        }
        if let Some(&r) = memo.get(&f) {
            return Ok(r);
        }
        let low = self.exists_rec(node.low, mask, last, memo)?;
        let r = if mask[node.var as usize] && low == TRUE {
            TRUE
        } else {
            let high = self.exists_rec(node.high, mask, last, memo)?;
            if mask[node.var as usize] {
                self.ite_rec(low, TRUE, high)?
            } else {
                self.mk(node.var, low, high)?
            }
        };
        memo.insert(f, r);
        Ok(r)
    }

    pub fn forall(&mut self, vars: &[BddVar], f: BddRef) -> BddResult<BddRef> {
        let nf = self.not(f)?;
        let e = self.exists(vars, nf)?;
        self.not(e)
    }

    /// Simultaneous substitution of functions for variables.
    pub fn compose(&mut self, f: BddRef, substitution: &[(BddVar, BddRef)]) -> BddResult<BddRef> {
        let mut table: Vec<Option<u32>> = vec![None; self.num_vars as usize];
        for &(v, g) in substitution {
            self.check_var(v)?;
            table[v.0 as usize] = Some(self.id_of(g)?);
        }
        let last = table
            .iter()
            .rposition(Option::is_some)
            .map_or(0, |p| p as u32 + 1);
        let f = self.id_of(f)?;
        let mut memo = HashMap::default();
        let r = self.compose_rec(f, &table, last, &mut memo)?;
        Ok(self.handle(r))
    }

    fn compose_rec(
        &mut self,
        f: u32,
        table: &[Option<u32>],
        last: u32,
        memo: &mut HashMap<u32, u32>,
    ) -> BddResult<u32> {
        let node = self.nodes[f as usize];
        if node.var == TERMINAL_VAR || node.var >= last {
            return Ok(f);
        }
        if let Some(&r) = memo.get(&f) {
            return Ok(r);
        }
        let low = self.compose_rec(node.low, table, last, memo)?;
        let high = self.compose_rec(node.high, table, last, memo)?;
        let select = match table[node.var as usize] {
            Some(g) => g,
            None => self.mk(node.var, FALSE, TRUE)?,
        };
        let r = self.ite_rec(select, high, low)?;
        memo.insert(f, r);
        Ok(r)
    }

    /// Value of `f` under a total assignment indexed by variable.
    pub fn eval(&self, f: BddRef, assignment: &[bool]) -> BddResult<bool> {
        let mut n = self.id_of(f)?;
        loop {
            let node = self.nodes[n as usize];
            if node.var == TERMINAL_VAR {
                return Ok(n == TRUE);
            }
            let value = *assignment
                .get(node.var as usize)
                .ok_or(BddError::UnknownVariable(node.var))?;
            n = if value { node.high } else { node.low };
        }
    }

    /// One satisfying partial assignment, preferring `false` for each
    /// decided variable. Variables off the chosen path are `None`.
    pub fn sat_one(&self, f: BddRef) -> BddResult<Option<Vec<Option<bool>>>> {
        let mut n = self.id_of(f)?;
        if n == FALSE {
            return Ok(None);
        }
        let mut cube = vec![None; self.num_vars as usize];
        while n != TRUE {
            let node = self.nodes[n as usize];
            if node.low != FALSE {
                cube[node.var as usize] = Some(false);
                n = node.low;
            } else {
                cube[node.var as usize] = Some(true);
                n = node.high;
            }
        }
        Ok(Some(cube))
    }

    /// Variables `f` depends on, in order.
    pub fn support(&self, f: BddRef) -> BddResult<Vec<BddVar>> {
        let mut seen = vec![false; self.num_vars as usize];
        for n in self.reachable(self.id_of(f)?) {
            let var = self.nodes[n as usize].var;
            if var != TERMINAL_VAR {
                seen[var as usize] = true;
            }
        }
        Ok((0..self.num_vars)
            .filter(|&v| seen[v as usize])
            .map(BddVar)
            .collect())
    }

    /// Number of internal nodes of `f`.
    pub fn node_count(&self, f: BddRef) -> BddResult<usize> {
        Ok(self
            .reachable(self.id_of(f)?)
            .into_iter()
            .filter(|&n| n > TRUE)
            .count())
    }

    fn reachable(&self, root: u32) -> Vec<u32> {
        let mut seen = FxHashSet::default();
        let mut stack = vec![root];
        let mut out = Vec::new();
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                continue;
            }
            out.push(n);
            let node = self.nodes[n as usize];
            if node.var != TERMINAL_VAR {
                stack.push(node.low);
                stack.push(node.high);
            }
        }
        out
    }

    /// Checks the reducedness and ordering invariants of the whole node
    /// store.
    pub fn is_canonical(&self) -> bool {
        if self.unique.len() + 2 != self.nodes.len() {
            return false;
        }
        self.nodes.iter().enumerate().skip(2).all(|(n, node)| {
            node.low != node.high
                && node.var < self.num_vars
                && node.var < self.level(node.low)
                && node.var < self.level(node.high)
                && self.unique.get(node) == Some(&(n as u32))
        })
    }
}
