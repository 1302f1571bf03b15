//! Inputs shared by the criterion benchmarks in `benches/`.

use omf5::neighbours::{default_prime, enumerate_genus, GenusData};
use omf5::{form, GenusDescriptor, QuinaryForm};

pub fn seed(d_minus: u64, d_plus: u64) -> QuinaryForm {
    form::seed_search(&GenusDescriptor::new(d_minus, d_plus).expect("valid descriptor"), 16).expect("seed exists")
}

pub fn genus(d_minus: u64, d_plus: u64) -> GenusData {
    let s = seed(d_minus, d_plus);
    enumerate_genus(&s, default_prime(&s)).expect("genus enumerates")
}
