//! Localization of pointed matrix classes.

use mclex::localization::{is_admissible, loc_equal, localize, localizes_to, substitute_star};
use mclex::matrix::parse_matrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let maltsev = parse_matrix("1 2 2 | 1 ; 2 2 1 | 1")?;
    let unital = parse_matrix("1 * | 1 ; * 1 | 1")?;
    let subtractive = parse_matrix("1 * | 1 ; 1 1 | *")?;

    println!("loc(unital) = {}", localize(&unital).result);
    println!("loc(subtractive) = {}", localize(&subtractive).result);
    println!("same localization: {}", loc_equal(&unital, &subtractive)?);
    println!("unital localizes to Mal'tsev: {}", localizes_to(&unital, &maltsev)?);

    if let Some(w) = is_admissible(&maltsev, 2)? {
        println!("(Mal'tsev, x2) admissible via left column {}", w.column + 1);
        println!("Mal'tsev[x2 -> *] = {}", substitute_star(&maltsev, 2)?);
    }
    Ok(())
}
