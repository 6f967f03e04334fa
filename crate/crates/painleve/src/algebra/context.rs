//! Variable declarations and the canonical global ordering.

use std::fmt;
use std::sync::Arc;

/// What a symbol stands for. The kind is fixed at declaration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    /// The independent variable t, with ∂(t) = 1.
    Time,
    /// A dependent quantity (y, x, y′, …); derivation images are assignable.
    Dependent,
    /// An exact equation parameter; ∂ = 0.
    Parameter,
    /// A transcendental constant, algebraically independent of everything
    /// else declared; ∂ = 0.
    Transcendental,
}

impl VarKind {
    pub fn is_constant(self) -> bool {
        matches!(self, VarKind::Parameter | VarKind::Transcendental)
    }
}

/// Index of a variable inside its [`Context`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub(crate) usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// An immutable, ordered variable set. Every polynomial carries a shared
/// reference to the context it lives in; mixing contexts is a programming
/// error and panics.
///
/// The ordering is the fixed global term order: time first, then dependent
/// variables in declaration order, then parameter/transcendental symbols
/// alphabetically. This makes canonical forms deterministic.
#[derive(Debug, PartialEq, Eq)]
pub struct Context {
    vars: Vec<(String, VarKind)>,
}

impl Context {
    pub fn builder() -> ContextBuilder {
        ContextBuilder { vars: Vec::new() }
    }

    /// Standard context: t, y, y′, y″, x plus the given constants.
    pub fn standard(constants: &[(&str, VarKind)]) -> Arc<Context> {
        let mut b = Context::builder()
            .time("t")
            .dependent("y")
            .dependent("y'")
            .dependent("y''")
            .dependent("x");
        for (name, kind) in constants {
            b = b.declare(name, *kind);
        }
        b.build()
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.vars[v.0].0
    }

    pub fn kind(&self, v: VarId) -> VarKind {
        self.vars[v.0].1
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|(n, _)| n == name).map(VarId)
    }

    /// Looks up `name`, panicking when absent. For internal fixed names.
    pub fn var(&self, name: &str) -> VarId {
        self.lookup(name)
            .unwrap_or_else(|| panic!("variable `{name}` not declared in context"))
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.vars.len()).map(VarId)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.vars.iter().map(|(n, _)| n.as_str()).collect();
        write!(f, "[{}]", names.join(", "))
    }
}

/// Builder for [`Context`]; `build` applies the canonical ordering.
pub struct ContextBuilder {
    vars: Vec<(String, VarKind)>,
}

impl ContextBuilder {
    pub fn time(self, name: &str) -> Self {
        self.declare(name, VarKind::Time)
    }

    pub fn dependent(self, name: &str) -> Self {
        self.declare(name, VarKind::Dependent)
    }

    pub fn parameter(self, name: &str) -> Self {
        self.declare(name, VarKind::Parameter)
    }

    pub fn transcendental(self, name: &str) -> Self {
        self.declare(name, VarKind::Transcendental)
    }

    pub fn declare(mut self, name: &str, kind: VarKind) -> Self {
        assert!(
            !self.vars.iter().any(|(n, _)| n == name),
            "variable `{name}` declared twice"
        );
        self.vars.push((name.to_string(), kind));
        self
    }

    pub fn build(self) -> Arc<Context> {
        let mut time = Vec::new();
        let mut dep = Vec::new();
        let mut consts = Vec::new();
        for v in self.vars {
            match v.1 {
                VarKind::Time => time.push(v),
                VarKind::Dependent => dep.push(v),
                _ => consts.push(v),
            }
        }
        assert!(time.len() <= 1, "at most one time variable");
        consts.sort_by(|a, b| a.0.cmp(&b.0));
        let mut vars = time;
        vars.extend(dep);
        vars.extend(consts);
        Arc::new(Context { vars })
    }
}
