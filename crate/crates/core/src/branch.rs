//! Sequential residue evaluation with branching over admissible poles.
//!
//! A [`Schedule`] lists the integration variables in elimination order. For
//! each variable the admissible poles are given by a [`PoleRule`]; a
//! designated linear factor is carried along the branch and updated by every
//! substitution, so its root is always expressed in the variables still
//! present. Poles of any other factor are never taken, but every factor that
//! vanishes at a chosen root contributes to the pole order.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linear::LinearForm;
use crate::parallel::par_map;
use crate::poly::Var;
use crate::ratexpr::RatExpr;
use crate::rational::Q;

#[derive(Debug, Clone)]
pub enum PoleRule {
    /// Residue at `v = 0` only.
    Zero,
    /// Residues at `v = 0` and at the root of the (evolved) designated factor.
    ZeroAndDesignated(LinearForm),
    /// Residue only at the root of the given (evolved) factor, never at 0.
    At(LinearForm),
}

#[derive(Debug, Clone)]
pub struct Step {
    pub var: Var,
    pub rule: PoleRule,
}

#[derive(Debug, Clone, Default)]
pub struct Schedule {
    pub steps: Vec<Step>,
}

impl Schedule {
    pub fn push(&mut self, var: Var, rule: PoleRule) {
        self.steps.push(Step { var, rule });
    }

    pub fn vars(&self) -> Vec<Var> {
        self.steps.iter().map(|s| s.var).collect()
    }
}

/// Per-branch bookkeeping: the current integrand and the evolved factors
/// attached to the variables not yet eliminated.
#[derive(Debug, Clone)]
pub struct BranchState {
    pub current: RatExpr,
    /// One entry per schedule step; `None` once a factor was consumed as a pole
    /// or no longer depends on its variable.
    pub designated: Vec<Option<LinearForm>>,
    pub weight: Q,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EvalOptions {
    /// Verify the integrand is homogeneous and each residue raises the degree by one.
    pub check_homogeneity: bool,
}

/// Sum over all branches of the iterated residues; the final expression must be a constant.
pub fn evaluate(expr: RatExpr, schedule: &Schedule, opts: EvalOptions) -> Result<Q> {
    if expr.is_zero() {
        return Ok(Q::zero());
    }
    let degree = if opts.check_homogeneity {
        Some(expr.homogeneous_degree().ok_or_else(|| {
            Error::Homogeneity("integrand numerator is not homogeneous".into())
        })?)
    } else {
        None
    };
    let designated = schedule
        .steps
        .iter()
        .map(|s| match &s.rule {
            PoleRule::Zero => None,
            PoleRule::ZeroAndDesignated(f) | PoleRule::At(f) => Some(f.clone()),
        })
        .collect();
    let state = BranchState { current: expr, designated, weight: num_traits::One::one() };
    eval_from(state, schedule, 0, degree)
}

fn eval_from(state: BranchState, schedule: &Schedule, idx: usize, degree: Option<i64>) -> Result<Q> {
    if idx == schedule.steps.len() {
        return state.current.as_constant().map(|c| c * &state.weight).ok_or_else(|| {
            Error::Homogeneity(format!("variables remain after all residues: {:?}", state.current))
        });
    }
    let step = &schedule.steps[idx];
    let v = step.var;
    let roots = admissible_roots(&step.rule, state.designated[idx].as_ref(), v)?;
    let results = par_map(roots, |root| -> Result<Q> {
        let next = state.current.residue(v, &root)?;
        if next.is_zero() {
            return Ok(Q::zero());
        }
        let next_degree = match degree {
            Some(d) => {
                let got = next.homogeneous_degree();
                if got != Some(d + 1) {
                    return Err(Error::Homogeneity(format!(
                        "residue in z{v} changed degree {d} to {got:?}, expected {}",
                        d + 1
                    )));
                }
                Some(d + 1)
            }
            None => None,
        };
        let designated = state
            .designated
            .iter()
            .enumerate()
            .map(|(j, f)| {
                if j <= idx {
                    return None;
                }
                let g = f.as_ref()?.substitute(v, &root);
                (!g.is_zero() && g.contains(schedule.steps[j].var)).then_some(g)
            })
            .collect();
        let branch = BranchState { current: next, designated, weight: state.weight.clone() };
        eval_from(branch, schedule, idx + 1, next_degree)
    });
    results.into_iter().try_fold(Q::zero(), |acc, r| Ok(acc + r?))
}

fn admissible_roots(rule: &PoleRule, designated: Option<&LinearForm>, v: Var) -> Result<Vec<LinearForm>> {
    let solve = |f: &LinearForm| -> Result<Option<LinearForm>> {
        if f.coeff(v).is_zero() {
            return Ok(None);
        }
        let r = f.solve_for(v).expect("coefficient checked nonzero");
        if r.contains(v) {
            return Err(Error::RootContainsVariable(v));
        }
        Ok(Some(r))
    };
    Ok(match rule {
        PoleRule::Zero => vec![LinearForm::zero()],
        PoleRule::ZeroAndDesignated(_) => {
            let mut roots = vec![LinearForm::zero()];
            if let Some(r) = designated.map(solve).transpose()?.flatten() {
                if !r.is_zero() {
                    roots.push(r);
                }
            }
            roots
        }
        PoleRule::At(_) => designated.map(solve).transpose()?.flatten().into_iter().collect(),
    })
}
