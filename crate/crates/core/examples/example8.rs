//! The single-cell counterexample: on the unit square with `a = 1 + x`, the
//! HDG and WG flux forms of the same lifted flux differ.

use wgfem::polybasis::Coefficient;
use wgfem::verify::{example8_with, paper_example_8};

fn main() {
    let e = paper_example_8();
    println!("a = 1 + x: hdg = {:.10}, wg = {:.10}, equal = {}", e.hdg_value, e.wg_value, e.equal);
    println!("ln 2 = {:.10}, 1.5 (ln 2)^2 = {:.10}", 2f64.ln(), 1.5 * 2f64.ln().powi(2));

    let e = example8_with(&Coefficient::one(), 8).unwrap();
    println!("a = 1:     hdg = {:.10}, wg = {:.10}, equal = {}", e.hdg_value, e.wg_value, e.equal);
}
