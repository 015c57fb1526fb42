//! Proof tableaux: produce, serialize, re-check.

use mclex::closure::{check_tableau, column_to_text, decide, TableauProof};
use mclex::matrix::parse_matrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let two_rows = parse_matrix("1 * * | 1 ; 2 2 1 | 1")?;
    let three_rows = parse_matrix("1 1 * | 1 ; * * 1 | 1 ; 1 * 1 | *")?;

    let d = decide(&[two_rows], &[three_rows])?;
    let proof = &d.tableaux[0];
    println!("verdict: {}", proof.verdict);
    for (i, step) in proof.steps.iter().enumerate() {
        let Some(w) = step.witnesses.first() else {
            println!("step {}: add ({}), the all-* column", i + 1, column_to_text(&step.added));
            continue;
        };
        println!(
            "step {}: add ({}) via row {} of hypothesis {} with map [{}]",
            i + 1,
            column_to_text(&step.added),
            w.row + 1,
            w.matrix + 1,
            column_to_text(&w.map)
        );
    }

    let json = proof.to_json();
    let back = TableauProof::from_json(&json)?;
    println!("replayed: {:?}", check_tableau(&back).map(|_| "accepted"));

    let mut forged = back.clone();
    forged.steps.reverse();
    println!("reordered: {:?}", check_tableau(&forged).map(|_| "accepted"));
    Ok(())
}
