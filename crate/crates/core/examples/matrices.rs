//! Parsing, printing and normalizing extended matrices.

use mclex::matrix::parse_matrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let su = parse_matrix("1 * * | 1 ; 2 2 1 | 1")?;
    println!("{} rows, {} left columns, {} variables", su.rows(), su.left_cols(), su.vars());
    println!("{}", su.to_grid_text());
    println!("normal form: {}", su.normalize());
    println!("term equations: {}", su.maltsev_condition());

    let multi = parse_matrix("#nmk 2 2 3\n1 * | 1\n* 1 | 1\n")?;
    println!("with header: {multi} (budget {})", multi.vars());

    match parse_matrix("1 2 | 1 ; 2 | 1") {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
