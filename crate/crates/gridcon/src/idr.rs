//! Interdependency Relations: operator trees over entity states and their
//! evaluation under the MIIM and IIM algebras.
//!
//! MIIM operators over {0, 1, 2}:
//! - min-AND selects the lowest input value
//! - max-OR selects the highest input value
//! - new-XOR returns the common value when all inputs agree, otherwise 1
//!
//! IIM is the binary predecessor: states are {0, 2}, max-OR stays maximum,
//! and both min-AND and new-XOR evaluate as minimum (plain AND).

use std::collections::BTreeSet;
use std::fmt;

use crate::entity::EntityId;
use crate::error::{Error, Result};
use crate::state::EvalModel;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdrExpression {
    Leaf(EntityId),
    MinAnd(Vec<IdrExpression>),
    MaxOr(Vec<IdrExpression>),
    NewXor(Vec<IdrExpression>),
}

impl IdrExpression {
    /// All entities named by leaves, in canonical order.
    pub fn leaves(&self) -> BTreeSet<EntityId> {
        let mut out = BTreeSet::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut BTreeSet<EntityId>) {
        match self {
            IdrExpression::Leaf(e) => {
                out.insert(*e);
            }
            IdrExpression::MinAnd(cs) | IdrExpression::MaxOr(cs) | IdrExpression::NewXor(cs) => {
                for c in cs {
                    c.collect_leaves(out);
                }
            }
        }
    }

    /// Number of operator (interior) nodes.
    pub fn operator_count(&self) -> usize {
        match self {
            IdrExpression::Leaf(_) => 0,
            IdrExpression::MinAnd(cs) | IdrExpression::MaxOr(cs) | IdrExpression::NewXor(cs) => {
                1 + cs.iter().map(|c| c.operator_count()).sum::<usize>()
            }
        }
    }

    /// Evaluate against a state lookup. Values are raw state numbers in
    /// {0, 1, 2}; the result is always in that range as well.
    pub fn eval<F>(&self, lookup: &F, model: EvalModel) -> Result<u8>
    where
        F: Fn(EntityId) -> Option<u8>,
    {
        match self {
            IdrExpression::Leaf(e) => {
                let v = lookup(*e).ok_or(Error::MissingState(*e))?;
                if model == EvalModel::Iim && v == 1 {
                    return Err(Error::IimNonBinary(*e));
                }
                Ok(v)
            }
            IdrExpression::MinAnd(cs) => fold_min(cs, lookup, model),
            IdrExpression::MaxOr(cs) => {
                let mut best = 0u8;
                for c in cs {
                    best = best.max(c.eval(lookup, model)?);
                }
                Ok(best)
            }
            IdrExpression::NewXor(cs) => match model {
                EvalModel::Iim => fold_min(cs, lookup, model),
                EvalModel::Miim => {
                    let first = cs[0].eval(lookup, model)?;
                    let mut all_equal = true;
                    for c in &cs[1..] {
                        if c.eval(lookup, model)? != first {
                            all_equal = false;
                        }
                    }
                    Ok(if all_equal { first } else { 1 })
                }
            },
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            IdrExpression::Leaf(_) => 4,
            IdrExpression::MinAnd(_) => 3,
            IdrExpression::MaxOr(_) => 2,
            IdrExpression::NewXor(_) => 1,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < parent;
        if parens {
            write!(f, "(")?;
        }
        match self {
            IdrExpression::Leaf(e) => write!(f, "{e}")?,
            IdrExpression::MinAnd(cs) => fmt_children(f, cs, " & ", prec)?,
            IdrExpression::MaxOr(cs) => fmt_children(f, cs, " | ", prec)?,
            IdrExpression::NewXor(cs) => fmt_children(f, cs, " # ", prec)?,
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn fold_min<F>(cs: &[IdrExpression], lookup: &F, model: EvalModel) -> Result<u8>
where
    F: Fn(EntityId) -> Option<u8>,
{
    let mut worst = 2u8;
    for c in cs {
        worst = worst.min(c.eval(lookup, model)?);
    }
    Ok(worst)
}

fn fmt_children(
    f: &mut fmt::Formatter<'_>,
    cs: &[IdrExpression],
    sep: &str,
    prec: u8,
) -> fmt::Result {
    for (i, c) in cs.iter().enumerate() {
        if i > 0 {
            write!(f, "{sep}")?;
        }
        // Equal precedence still needs parens for same-operator children,
        // since the parser flattens chains into one n-ary node.
        c.fmt_prec(f, prec + 1)?;
    }
    Ok(())
}

impl fmt::Display for IdrExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// One interdependency relation: the target's next state is the value of
/// the expression over the other entities' current states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Idr {
    pub target: EntityId,
    pub expr: IdrExpression,
}

impl Idr {
    pub fn new(target: EntityId, expr: IdrExpression) -> Result<Self> {
        if expr.leaves().contains(&target) {
            return Err(Error::SelfDependency(target));
        }
        if !well_formed(&expr) {
            return Err(Error::BadDocument(format!(
                "IDR for `{target}` has an operator node with fewer than two operands"
            )));
        }
        Ok(Idr { target, expr })
    }
}

/// Every interior node carries at least two children.
fn well_formed(expr: &IdrExpression) -> bool {
    match expr {
        IdrExpression::Leaf(_) => true,
        IdrExpression::MinAnd(cs) | IdrExpression::MaxOr(cs) | IdrExpression::NewXor(cs) => {
            cs.len() >= 2 && cs.iter().all(well_formed)
        }
    }
}

impl fmt::Display for Idr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <- {}", self.target, self.expr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn states(pairs: &[(&str, u8)]) -> BTreeMap<EntityId, u8> {
        pairs.iter().map(|(t, v)| (t.parse().unwrap(), *v)).collect()
    }

    fn eval(expr: &IdrExpression, st: &BTreeMap<EntityId, u8>, model: EvalModel) -> u8 {
        expr.eval(&|e| st.get(&e).copied(), model).unwrap()
    }

    #[test]
    fn miim_truth_table() {
        // All nine input pairs of the binary operator table.
        let rows: [(u8, u8, u8, u8, u8); 9] = [
            (2, 2, 2, 2, 2),
            (2, 1, 1, 2, 1),
            (2, 0, 0, 2, 1),
            (1, 2, 1, 2, 1),
            (1, 1, 1, 1, 1),
            (1, 0, 0, 1, 1),
            (0, 2, 0, 2, 1),
            (0, 1, 0, 1, 1),
            (0, 0, 0, 0, 0),
        ];
        for (a, b, min_and, max_or, new_xor) in rows {
            let st = states(&[("P1", a), ("P2", b)]);
            let leaves = || vec![IdrExpression::Leaf("P1".parse().unwrap()), IdrExpression::Leaf("P2".parse().unwrap())];
            assert_eq!(eval(&IdrExpression::MinAnd(leaves()), &st, EvalModel::Miim), min_and);
            assert_eq!(eval(&IdrExpression::MaxOr(leaves()), &st, EvalModel::Miim), max_or);
            assert_eq!(eval(&IdrExpression::NewXor(leaves()), &st, EvalModel::Miim), new_xor);
        }
    }

    #[test]
    fn nary_new_xor_all_equal() {
        let st = states(&[("P1", 1), ("P2", 1), ("P3", 1)]);
        let expr = IdrExpression::NewXor(vec![
            IdrExpression::Leaf("P1".parse().unwrap()),
            IdrExpression::Leaf("P2".parse().unwrap()),
            IdrExpression::Leaf("P3".parse().unwrap()),
        ]);
        assert_eq!(eval(&expr, &st, EvalModel::Miim), 1);
    }

    #[test]
    fn iim_rejects_reduced_state() {
        let st = states(&[("P1", 1), ("P2", 2)]);
        let expr = IdrExpression::MinAnd(vec![
            IdrExpression::Leaf("P1".parse().unwrap()),
            IdrExpression::Leaf("P2".parse().unwrap()),
        ]);
        assert!(matches!(
            expr.eval(&|e| st.get(&e).copied(), EvalModel::Iim),
            Err(Error::IimNonBinary(_))
        ));
    }

    #[test]
    fn missing_state_is_an_error() {
        let st = states(&[]);
        let expr = IdrExpression::Leaf("P1".parse().unwrap());
        assert!(matches!(
            expr.eval(&|e| st.get(&e).copied(), EvalModel::Miim),
            Err(Error::MissingState(_))
        ));
    }

    #[test]
    fn self_dependency_rejected() {
        let target: EntityId = "P7".parse().unwrap();
        let expr = IdrExpression::MinAnd(vec![
            IdrExpression::Leaf("P7".parse().unwrap()),
            IdrExpression::Leaf("P4".parse().unwrap()),
        ]);
        assert!(matches!(Idr::new(target, expr), Err(Error::SelfDependency(_))));
    }
}
