//! Serialized round trip: measure, spectral JSON, and back.

use krein_star::cli::roundtrip_case;
use krein_star::forward::export_spectral_data;
use krein_star::inverse::solve;
use krein_star::io::{measure_from_str, measure_to_string, spectral_from_str, spectral_to_string};
use krein_star::random::{random_measures, RandomConfig};

const MEASURE: &str = r#"{
  "format": "krein-star/1",
  "central_mass": "0.5",
  "edges": [
    {"id": "a", "length": "1", "masses": [{"x": "0.25", "m": "1"}, {"x": "0.5", "m": "2"}]},
    {"id": "b", "length": "1", "masses": [{"x": "0.25", "m": "1"}, {"x": "0.5", "m": "2"}]},
    {"id": "c", "length": "1.5", "masses": [{"x": "1/3", "m": "1"}]}
  ]
}"#;

fn main() {
    let m = measure_from_str(MEASURE).unwrap();
    let text = spectral_to_string(&export_spectral_data(&m).unwrap(), 30);
    print!("{text}");
    let back = solve(&spectral_from_str(&text, None).unwrap()).unwrap();
    print!("{}", measure_to_string(&back, 12));

    let cases = random_measures(3, 10, &RandomConfig::default());
    for (i, c) in cases.iter().enumerate() {
        let r = roundtrip_case(c, 30).unwrap();
        let dev = r.deviation.map(|d| krein_star::number::to_f64(&d));
        println!("case {i}: {} masses, exact {}, deviation {:?}", r.masses, r.exact, dev);
    }
}
