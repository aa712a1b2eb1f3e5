mod common;

use dlglab::net::Hyperparams;

fn hp(conv_layers: usize, residual: bool, theta0_zero: bool) -> Hyperparams {
    Hyperparams {
        input_channels: 3,
        conv_layers,
        filters: 4,
        linear_layers: 2,
        hidden: 5,
        classes: 3,
        residual,
        theta0_zero,
    }
}

#[test]
fn analytic_gradients_match_finite_differences() {
    for (seed, (layers, residual, theta0_zero)) in
        [(1, true, false), (2, false, false), (3, true, true), (1, false, false)].into_iter().enumerate()
    {
        let g = common::hypergraph_with_edges(seed as u64, 6);
        let check = common::gradient_check(hp(layers, residual, theta0_zero), &g, seed as u64, 1e-5, 1e-4, 1e-8);
        assert_eq!(check.failures, 0, "variant {seed}: worst relative error {}", check.worst_relative);
    }
}

#[test]
fn single_linear_layer_head() {
    let hp = Hyperparams { linear_layers: 1, ..hp(2, true, false) };
    let g = common::hypergraph_with_edges(9, 5);
    let check = common::gradient_check(hp, &g, 9, 1e-5, 1e-4, 1e-8);
    assert_eq!(check.failures, 0, "worst relative error {}", check.worst_relative);
}
