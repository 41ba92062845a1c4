#[allow(dead_code)]
mod equatorial_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/equatorial.rs"));
}

#[test]
fn equatorial_example_runs() {
    equatorial_example::run_example().expect("equatorial example should run");
}

#[allow(dead_code)]
mod table_rsp_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/table_rsp.rs"));
}

#[test]
fn table_rsp_example_runs() {
    table_rsp_example::run_example().expect("table_rsp example should run");
}

#[allow(dead_code)]
mod qudit_measure_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/qudit_measure.rs"));
}

#[test]
fn qudit_measure_example_runs() {
    qudit_measure_example::run_example().expect("qudit_measure example should run");
}

#[allow(dead_code)]
mod teleport_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/teleport.rs"));
}

#[test]
fn teleport_example_runs() {
    teleport_example::run_example().expect("teleport example should run");
}

#[allow(dead_code)]
mod recycling_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/recycling.rs"));
}

#[test]
fn recycling_example_runs() {
    recycling_example::run_example().expect("recycling example should run");
}

#[allow(dead_code)]
mod lowent_tradeoff_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/lowent_tradeoff.rs"));
}

#[test]
fn lowent_tradeoff_example_runs() {
    lowent_tradeoff_example::run_example().expect("lowent_tradeoff example should run");
}

#[allow(dead_code)]
mod entangled_filter_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/entangled_filter.rs"));
}

#[test]
fn entangled_filter_example_runs() {
    entangled_filter_example::run_example().expect("entangled_filter example should run");
}

#[allow(dead_code)]
mod holevo_bound_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/holevo_bound.rs"));
}

#[test]
fn holevo_bound_example_runs() {
    holevo_bound_example::run_example().expect("holevo_bound example should run");
}

#[allow(dead_code)]
mod causality_bound_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/causality_bound.rs"));
}

#[test]
fn causality_bound_example_runs() {
    causality_bound_example::run_example().expect("causality_bound example should run");
}

#[allow(dead_code)]
mod experiment_runner_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/experiment_runner.rs"));
}

#[test]
fn experiment_runner_example_runs() {
    experiment_runner_example::run_example().expect("experiment_runner example should run");
}
