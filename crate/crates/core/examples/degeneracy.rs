//! Trivial and anti-trivial matrices.

use mclex::degeneracy::{degeneracy_class, is_trivial, join_partition};
use mclex::matrix::parse_matrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for text in ["| 1", "* | 1", "| *", "1 | 1", "1 * | 1 ; * 1 | 1", "1 | 1 ; 1 | *", "1 * | 1 ; 1 1 | *"] {
        let m = parse_matrix(text)?;
        println!("{text:24} {:?}", degeneracy_class(&m));
    }

    let m = parse_matrix("1 1 * | 1 ; * 1 1 | *")?;
    println!("join partition of rows 1 and 2: {:?}", join_partition(&m, 0, 1).blocks());
    println!("trivial: {}", is_trivial(&m));
    Ok(())
}
