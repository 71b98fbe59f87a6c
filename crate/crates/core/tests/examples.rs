// Every example must run to completion.

#[path = "../examples/distance_measures.rs"]
mod distance_measures;

#[path = "../examples/photon_inequalities.rs"]
mod photon_inequalities;

#[path = "../examples/photon_tomograms.rs"]
mod photon_tomograms;

#[path = "../examples/spin_reconstruction.rs"]
mod spin_reconstruction;

#[path = "../examples/star_product_fidelity.rs"]
mod star_product_fidelity;

#[path = "../examples/state_files.rs"]
mod state_files;

#[path = "../examples/su2_restricted.rs"]
mod su2_restricted;

#[path = "../examples/unitary_search.rs"]
mod unitary_search;

#[test]
fn distance_measures_runs() {
    distance_measures::run().unwrap();
}

#[test]
fn photon_inequalities_runs() {
    photon_inequalities::run().unwrap();
}

#[test]
fn photon_tomograms_runs() {
    photon_tomograms::run().unwrap();
}

#[test]
fn spin_reconstruction_runs() {
    spin_reconstruction::run().unwrap();
}

#[test]
fn star_product_fidelity_runs() {
    star_product_fidelity::run().unwrap();
}

#[test]
fn state_files_runs() {
    state_files::run().unwrap();
}

#[test]
fn su2_restricted_runs() {
    su2_restricted::run().unwrap();
}

#[test]
fn unitary_search_runs() {
    unitary_search::run().unwrap();
}

