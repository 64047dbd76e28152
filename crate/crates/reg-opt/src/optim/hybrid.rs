//! Per-group dispatch: each parameter group is stepped by the rule it is
//! assigned to, independently of the others.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::optim::{adamw_step, reg_step, AdamWConfig, Assignment, ParamGroup, RegConfig, StepStats};

/// Step every group with its assigned rule. Groups are independent; a shape
/// error is reported with the offending group's name.
pub fn hybrid_step(
    groups: &mut [ParamGroup],
    grads: &[Matrix],
    reg_cfg: &RegConfig,
    adamw_cfg: &AdamWConfig,
) -> Result<Vec<StepStats>> {
    if groups.len() != grads.len() {
        return Err(Error::ConfigInvalid(format!(
            "{} parameter groups but {} gradients",
            groups.len(),
            grads.len()
        )));
    }
    groups
        .iter_mut()
        .zip(grads)
        .map(|(group, grad)| {
            let result = match group.assignment {
                Assignment::Reg => reg_step(&mut group.weights, grad, &mut group.state, reg_cfg),
                Assignment::AdamW => adamw_step(
                    &mut group.weights,
                    grad,
                    &mut group.state,
                    adamw_cfg.alpha,
                    adamw_cfg.beta1,
                    adamw_cfg.beta2,
                    adamw_cfg.epsilon,
                    adamw_cfg.lambda,
                ),
            };
            result.map_err(|e| e.in_group(&group.name))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::OptState;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy_groups(rng: &mut ChaCha8Rng, assignments: [Assignment; 2]) -> Vec<ParamGroup> {
        vec![
            ParamGroup::new("layer1", Matrix::gaussian(3, 5, rng), assignments[0]),
            ParamGroup::new("layer2", Matrix::gaussian(2, 3, rng), assignments[1]),
        ]
    }

    #[test]
    fn mixed_assignment_composes_the_single_steppers() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let mut groups = toy_groups(&mut rng, [Assignment::AdamW, Assignment::Reg]);
        let initial: Vec<Matrix> = groups.iter().map(|g| g.weights.clone()).collect();
        let grads = vec![
            Matrix::gaussian(3, 5, &mut rng),
            Matrix::gaussian(2, 3, &mut rng),
        ];
        let reg_cfg = RegConfig::new(0.1);
        let adamw_cfg = AdamWConfig {
            lambda: 0.01,
            ..AdamWConfig::new(0.02)
        };

        hybrid_step(&mut groups, &grads, &reg_cfg, &adamw_cfg).unwrap();

        // Manual composition of the two steppers, group by group.
        let mut w0 = initial[0].clone();
        let mut s0 = OptState::for_param(&w0);
        adamw_step(
            &mut w0, &grads[0], &mut s0, 0.02, adamw_cfg.beta1, adamw_cfg.beta2,
            adamw_cfg.epsilon, 0.01,
        )
        .unwrap();
        let mut w1 = initial[1].clone();
        let mut s1 = OptState::for_param(&w1);
        reg_step(&mut w1, &grads[1], &mut s1, &reg_cfg).unwrap();

        assert_eq!(groups[0].weights, w0);
        assert_eq!(groups[1].weights, w1);
    }

    #[test]
    fn uniform_assignments_match_direct_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for assignment in [Assignment::Reg, Assignment::AdamW] {
            let mut groups = toy_groups(&mut rng, [assignment, assignment]);
            let initial: Vec<Matrix> = groups.iter().map(|g| g.weights.clone()).collect();
            let grads = vec![
                Matrix::gaussian(3, 5, &mut rng),
                Matrix::gaussian(2, 3, &mut rng),
            ];
            let reg_cfg = RegConfig::new(0.1);
            let adamw_cfg = AdamWConfig::new(0.02);
            hybrid_step(&mut groups, &grads, &reg_cfg, &adamw_cfg).unwrap();

            for (i, group) in groups.iter().enumerate() {
                let mut w = initial[i].clone();
                let mut s = OptState::for_param(&w);
                match assignment {
                    Assignment::Reg => {
                        reg_step(&mut w, &grads[i], &mut s, &reg_cfg).unwrap();
                    }
                    Assignment::AdamW => {
                        adamw_step(
                            &mut w, &grads[i], &mut s, 0.02, adamw_cfg.beta1,
                            adamw_cfg.beta2, adamw_cfg.epsilon, 0.0,
                        )
                        .unwrap();
                    }
                }
                assert_eq!(group.weights, w);
            }
        }
    }

    #[test]
    fn shape_errors_carry_the_group_name() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let mut groups = toy_groups(&mut rng, [Assignment::Reg, Assignment::Reg]);
        let grads = vec![
            Matrix::gaussian(3, 5, &mut rng),
            Matrix::gaussian(9, 9, &mut rng),
        ];
        let err = hybrid_step(&mut groups, &grads, &RegConfig::new(0.1), &AdamWConfig::new(0.01))
            .unwrap_err();
        assert!(err.to_string().contains("layer2"), "got: {err}");
    }
}
