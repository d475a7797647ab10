use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{AllocationPolicy, NetworkInstance};

/// The allocation constraints a policy must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    /// Array shapes match the instance.
    Shape,
    /// Every decision variable is 0 or 1.
    Binary,
    /// Link-indexed arrays are zero on the `i == j` diagonal.
    SelfLink,
    /// A level needed by agent `i` reaches `i` as the Tx of every link `i -> j`.
    TxAvailability,
    /// A level needed by agent `j` reaches `j` as the Rx of every link `i -> j`.
    RxAvailability,
    /// A link using level `l'` needs every level `l <= l'` at both endpoints.
    LevelNesting,
    /// Only an agent that stores a chunk may send it.
    SourceStored,
    /// Every link uses exactly one level.
    SingleLevel,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Constraint::Shape => "shape",
            Constraint::Binary => "binary",
            Constraint::SelfLink => "self-link",
            Constraint::TxAvailability => "tx-availability",
            Constraint::RxAvailability => "rx-availability",
            Constraint::LevelNesting => "level-nesting",
            Constraint::SourceStored => "source-stored",
            Constraint::SingleLevel => "single-level",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintViolation {
    pub constraint: Constraint,
    pub detail: String,
}

impl fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.constraint, self.detail)
    }
}

/// Lists every constraint the policy breaks for task `k`; empty means feasible.
pub fn check_constraints(inst: &NetworkInstance, policy: &AllocationPolicy, k: usize) -> Vec<ConstraintViolation> {
    let (n, levels) = (inst.n_agents, inst.n_levels);
    let mut out = Vec::new();
    let mut push = |constraint, detail: String| out.push(ConstraintViolation { constraint, detail });

    if k >= inst.n_tasks {
        push(Constraint::Shape, format!("task {k} out of range"));
        return out;
    }
    if let Err(e) = policy.check_shape(n, levels) {
        push(Constraint::Shape, e.to_string());
        return out;
    }

    let e = &policy.exploit;
    let s = &policy.store;
    let phi = &policy.tx_to_tx;
    let psi = &policy.tx_to_rx;
    let tau = &policy.needed;

    for i in 0..n {
        for l in 0..levels {
            if s[i][l] > 1 {
                push(Constraint::Binary, format!("store[{i}][{l}] = {}", s[i][l]));
            }
            if tau[i][l] > 1 {
                push(Constraint::Binary, format!("needed[{i}][{l}] = {}", tau[i][l]));
            }
        }
    }
    for h in 0..n {
        for i in 0..n {
            for j in 0..n {
                for l in 0..levels {
                    for (name, arr) in [("tx_to_tx", phi), ("tx_to_rx", psi)] {
                        let v = arr[h][i][j][l];
                        if v > 1 {
                            push(Constraint::Binary, format!("{name}[{h}][{i}][{j}][{l}] = {v}"));
                        } else if v == 1 && i == j {
                            push(Constraint::SelfLink, format!("{name}[{h}][{i}][{j}][{l}] set on a self-link"));
                        }
                    }
                }
            }
        }
    }

    for i in 0..n {
        for j in 0..n {
            if i == j {
                if e[i][j].iter().any(|&v| v != 0) {
                    push(Constraint::SelfLink, format!("exploit[{i}][{i}] set on a self-link"));
                }
                continue;
            }
            let mut ones = 0u32;
            for l in 0..levels {
                match e[i][j][l] {
                    0 => {}
                    1 => ones += 1,
                    v => push(Constraint::Binary, format!("exploit[{i}][{j}][{l}] = {v}")),
                }
            }
            if ones != 1 {
                push(Constraint::SingleLevel, format!("link {i}->{j} selects {ones} levels"));
            }

            for l in 0..levels {
                let from_tx: u32 = (0..n).map(|h| phi[h][i][j][l] as u32).sum();
                if tau[i][l] as u32 > from_tx + s[i][l] as u32 {
                    push(
                        Constraint::TxAvailability,
                        format!("agent {i} needs level {l} but link {i}->{j} neither stores nor receives it"),
                    );
                }
                let from_rx: u32 = (0..n).map(|h| psi[h][i][j][l] as u32).sum();
                if tau[j][l] as u32 > from_rx + s[j][l] as u32 {
                    push(
                        Constraint::RxAvailability,
                        format!("agent {j} needs level {l} but link {i}->{j} neither stores nor receives it"),
                    );
                }
                for h in 0..n {
                    if phi[h][i][j][l] > s[h][l] {
                        push(
                            Constraint::SourceStored,
                            format!("tx_to_tx[{h}][{i}][{j}][{l}] sends a chunk agent {h} does not store"),
                        );
                    }
                    if psi[h][i][j][l] > s[h][l] {
                        push(
                            Constraint::SourceStored,
                            format!("tx_to_rx[{h}][{i}][{j}][{l}] sends a chunk agent {h} does not store"),
                        );
                    }
                }
                for lp in l..levels {
                    if e[i][j][lp] > tau[i][l] {
                        push(
                            Constraint::LevelNesting,
                            format!("link {i}->{j} uses level {lp} but agent {i} does not need level {l}"),
                        );
                    }
                    if e[j][i][lp] > tau[i][l] {
                        push(
                            Constraint::LevelNesting,
                            format!("link {j}->{i} uses level {lp} but agent {i} does not need level {l}"),
                        );
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::test_support::two_agent;

    /// Link 0 -> 1 and 1 -> 0 at level 0, both agents store everything.
    fn minimal_feasible() -> AllocationPolicy {
        let mut p = AllocationPolicy::zeros(2, 2);
        p.store = vec![vec![1, 1], vec![1, 1]];
        p.exploit[0][1][0] = 1;
        p.exploit[1][0][0] = 1;
        p.needed[0][0] = 1;
        p.needed[1][0] = 1;
        p
    }

    #[test]
    fn stored_chunks_need_no_transmission() {
        assert!(check_constraints(&two_agent(), &minimal_feasible(), 0).is_empty());
    }

    #[test]
    fn higher_level_without_lower_need() {
        let mut p = minimal_feasible();
        p.exploit[0][1] = vec![0, 1];
        p.needed[0] = vec![0, 1];
        p.needed[1] = vec![1, 1];
        let v = check_constraints(&two_agent(), &p, 0);
        assert!(v.iter().any(|v| v.constraint == Constraint::LevelNesting), "{v:?}");
    }

    #[test]
    fn sending_unstored_chunk() {
        let mut p = minimal_feasible();
        p.store[1][0] = 0;
        p.tx_to_tx[1][0][1][0] = 1;
        let v = check_constraints(&two_agent(), &p, 0);
        assert!(v.iter().any(|v| v.constraint == Constraint::SourceStored));
    }

    #[test]
    fn two_levels_on_one_link() {
        let mut p = minimal_feasible();
        p.exploit[1][0] = vec![1, 1];
        p.needed[1][1] = 1;
        p.needed[0][1] = 1;
        let v = check_constraints(&two_agent(), &p, 0);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].constraint, Constraint::SingleLevel);
    }

    #[test]
    fn missing_supply_is_reported_on_both_sides() {
        let mut p = minimal_feasible();
        p.store[1] = vec![0, 0];
        let v = check_constraints(&two_agent(), &p, 0);
        assert!(v.iter().any(|v| v.constraint == Constraint::TxAvailability));
        assert!(v.iter().any(|v| v.constraint == Constraint::RxAvailability));
    }

    #[test]
    fn non_binary_and_shape() {
        let mut p = minimal_feasible();
        p.store[0][0] = 2;
        let v = check_constraints(&two_agent(), &p, 0);
        assert!(v.iter().any(|v| v.constraint == Constraint::Binary));
        let wrong = AllocationPolicy::zeros(3, 2);
        let v = check_constraints(&two_agent(), &wrong, 0);
        assert_eq!(v[0].constraint, Constraint::Shape);
    }
}
