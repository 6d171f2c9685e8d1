//! Minimax over the alternating assignment tree of a quantified 3-CNF
//! formula. The existential player maximizes the number of satisfied
//! clauses, the universal player minimizes it.

use gamelab_core::qbf::{QbfInstance, Quant};
use gamelab_core::CoreError;

pub const DEFAULT_VAR_CAP: usize = 16;

fn satisfied_clauses(f: &QbfInstance, assignment: &[bool]) -> usize {
    f.clauses
        .iter()
        .filter(|clause| {
            clause.iter().any(|&lit| {
                let v = lit.unsigned_abs() as usize - 1;
                if lit > 0 {
                    assignment[v]
                } else {
                    !assignment[v]
                }
            })
        })
        .count()
}

fn minimax(f: &QbfInstance, level: usize, assignment: &mut Vec<bool>) -> usize {
    if level == f.num_vars() {
        return satisfied_clauses(f, assignment);
    }
    let mut best: Option<usize> = None;
    for value in [false, true] {
        assignment.push(value);
        let v = minimax(f, level + 1, assignment);
        assignment.pop();
        best = Some(match (best, f.prefix[level]) {
            (None, _) => v,
            (Some(b), Quant::Exists) => b.max(v),
            (Some(b), Quant::Forall) => b.min(v),
        });
    }
    best.unwrap()
}

/// Game value of the #satisfied-clauses objective under optimal alternating
/// play: the largest t such that the existential player can guarantee t
/// simultaneously satisfied clauses.
pub fn maxqsat_value(f: &QbfInstance) -> Result<usize, CoreError> {
    maxqsat_value_capped(f, DEFAULT_VAR_CAP)
}

pub fn maxqsat_value_capped(f: &QbfInstance, cap: usize) -> Result<usize, CoreError> {
    if f.num_vars() > cap {
        return Err(CoreError::Domain(format!(
            "instance has {} variables; oracle cap is {cap}",
            f.num_vars()
        )));
    }
    Ok(minimax(f, 0, &mut Vec::new()))
}

/// Is the QBF true, i.e. can the existential player guarantee that every
/// clause is satisfied?
pub fn qbf_true(f: &QbfInstance) -> Result<bool, CoreError> {
    Ok(maxqsat_value(f)? == f.num_clauses())
}

/// The existential player's optimal move for the variable at `level`, given
/// the assignment so far. Used to drive strategy scripts.
pub fn optimal_exists_move(f: &QbfInstance, partial: &[bool]) -> Result<bool, CoreError> {
    if f.num_vars() > DEFAULT_VAR_CAP {
        return Err(CoreError::Domain("instance exceeds oracle cap".into()));
    }
    let level = partial.len();
    if level >= f.num_vars() || f.prefix[level] != Quant::Exists {
        return Err(CoreError::Domain(format!(
            "no existential variable at position {level}"
        )));
    }
    let mut asg = partial.to_vec();
    asg.push(false);
    let v0 = minimax(f, level + 1, &mut asg);
    asg.pop();
    asg.push(true);
    let v1 = minimax(f, level + 1, &mut asg);
    Ok(v1 >= v0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(clauses: Vec<Vec<i32>>) -> QbfInstance {
        QbfInstance::new(vec![Quant::Exists, Quant::Forall], clauses).unwrap()
    }

    #[test]
    fn exists_can_set_its_own_variable() {
        let f = inst(vec![vec![1]]);
        assert!(qbf_true(&f).unwrap());
        assert_eq!(maxqsat_value(&f).unwrap(), 1);
    }

    #[test]
    fn forall_controls_contradictory_clauses() {
        let f = inst(vec![vec![2], vec![-2]]);
        assert_eq!(maxqsat_value(&f).unwrap(), 1);
        assert!(!qbf_true(&f).unwrap());
    }

    #[test]
    fn agreement_with_truth_table_on_all_two_var_instances() {
        // exhaustive: all <= 3-clause sets over literals of x1, x2
        let literals = [1i32, -1, 2, -2];
        let mut clauses_pool: Vec<Vec<i32>> = Vec::new();
        for mask in 1u32..(1 << 4) {
            if mask.count_ones() <= 3 {
                clauses_pool.push(
                    literals
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, &l)| l)
                        .collect(),
                );
            }
        }
        let mut total = 0;
        for a in 0..clauses_pool.len() {
            for b in a..clauses_pool.len() {
                for c in b..clauses_pool.len() {
                    let f = inst(vec![
                        clauses_pool[a].clone(),
                        clauses_pool[b].clone(),
                        clauses_pool[c].clone(),
                    ]);
                    // reference: explicit game tree over 4 assignments
                    let mut best = 0;
                    for x1 in [false, true] {
                        let mut worst = usize::MAX;
                        for x2 in [false, true] {
                            worst = worst.min(satisfied_clauses(&f, &[x1, x2]));
                        }
                        best = best.max(worst);
                    }
                    assert_eq!(maxqsat_value(&f).unwrap(), best);
                    total += 1;
                }
            }
        }
        assert!(total > 100);
    }

    #[test]
    fn value_never_exceeds_clause_count() {
        let f = inst(vec![vec![1, 2], vec![-1, -2]]);
        let v = maxqsat_value(&f).unwrap();
        assert!(v <= f.num_clauses());
        assert_eq!(v == f.num_clauses(), qbf_true(&f).unwrap());
    }
}
