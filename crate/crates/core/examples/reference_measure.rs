//! Prints the seeded 12-atom reference measure as a measure document.
//!
//! cargo run --example reference_measure > data/reference_measure.json

use twomat::io::{measure_to_value, to_json_string};
use twomat::sampling::reference_measure;

fn main() {
    print!("{}", to_json_string(&measure_to_value(&reference_measure())));
}
