//! Every example under examples/ runs to completion.

mod alpha_star {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/alpha_star.rs"));
}

#[test]
fn alpha_star_runs() {
    alpha_star::run_example().expect("alpha_star example");
}

mod crm_synthesis {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/crm_synthesis.rs"));
}

#[test]
fn crm_synthesis_runs() {
    crm_synthesis::run_example().expect("crm_synthesis example");
}

mod improving_elements {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/improving_elements.rs"));
}

#[test]
fn improving_elements_runs() {
    improving_elements::run_example().expect("improving_elements example");
}

mod closure_properties {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/closure_properties.rs"));
}

#[test]
fn closure_properties_runs() {
    closure_properties::run_example().expect("closure_properties example");
}

mod oblivious_adversary {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/oblivious_adversary.rs"));
}

#[test]
fn oblivious_adversary_runs() {
    oblivious_adversary::run_example().expect("oblivious_adversary example");
}

mod online_mixture {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/online_mixture.rs"));
}

#[test]
fn online_mixture_runs() {
    online_mixture::run_example().expect("online_mixture example");
}

mod fixed_order_bound {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fixed_order_bound.rs"));
}

#[test]
fn fixed_order_bound_runs() {
    fixed_order_bound::run_example().expect("fixed_order_bound example");
}

mod secretary_simulation {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/secretary_simulation.rs"));
}

#[test]
fn secretary_simulation_runs() {
    secretary_simulation::run_example().expect("secretary_simulation example");
}

mod blueprint {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/blueprint.rs"));
}

#[test]
fn blueprint_runs() {
    blueprint::run_example().expect("blueprint example");
}

mod descriptors {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/descriptors.rs"));
}

#[test]
fn descriptors_runs() {
    descriptors::run_example().expect("descriptors example");
}

mod exact_lp {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/exact_lp.rs"));
}

#[test]
fn exact_lp_runs() {
    exact_lp::run_example().expect("exact_lp example");
}
