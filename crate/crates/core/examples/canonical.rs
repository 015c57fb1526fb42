//! Canonical representatives inside a window.

use mclex::enumeration::canonical;
use mclex::matrix::parse_matrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let su = parse_matrix("1 * * | 1 ; 2 2 1 | 1")?;
    println!("(2,3,2): {}", canonical(&su, 2, 3, 2)?);
    let su3 = parse_matrix("1 1 * | 1 ; * * 1 | 1 ; 1 * 1 | *")?;
    println!("(3,3,1): {}", canonical(&su3, 3, 3, 1)?);
    let maltsev = parse_matrix("1 2 2 | 1 ; 2 2 1 | 1")?;
    println!("(2,3,2): {}", canonical(&maltsev, 2, 3, 2)?);
    Ok(())
}
