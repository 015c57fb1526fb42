//! Implications between matrix conditions.

use mclex::closure::{decide, implies};
use mclex::matrix::parse_matrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let maltsev = parse_matrix("1 2 2 | 1 ; 2 2 1 | 1")?;
    let strongly_unital = parse_matrix("1 * * | 1 ; 2 2 1 | 1")?;
    let unital = parse_matrix("1 * | 1 ; * 1 | 1")?;
    let subtractive = parse_matrix("1 * | 1 ; 1 1 | *")?;

    let pairs = [
        ("Mal'tsev", &maltsev, "strongly unital", &strongly_unital),
        ("strongly unital", &strongly_unital, "Mal'tsev", &maltsev),
        ("unital", &unital, "subtractive", &subtractive),
    ];
    for (a, ma, b, mb) in pairs {
        let yes = implies(std::slice::from_ref(ma), std::slice::from_ref(mb))?;
        println!("{a} => {b}: {yes}");
    }

    // A set of hypotheses on the left, several goals on the right.
    let d = decide(&[unital.clone(), subtractive.clone()], std::slice::from_ref(&strongly_unital))?;
    println!("unital + subtractive => strongly unital: {}", d.verdict);
    let d = decide(&[strongly_unital], &[unital, subtractive])?;
    println!("strongly unital => unital + subtractive: {}", d.verdict);
    Ok(())
}
