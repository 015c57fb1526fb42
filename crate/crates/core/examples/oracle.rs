//! Brute-force checks on small pointed sets.

use mclex::matrix::parse_matrix;
use mclex::oracle::{
    closed, example_relation, has_forbidden_reduction, is_functional, reflect, run_battery, sharp, strictly_closed,
    ConcreteRelation, Level, PointedSet,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = example_relation();
    let m = parse_matrix("1 * * | 1 ; 2 2 1 | 1")?;
    let m21 = parse_matrix("2 2 1 | 1 ; 1 * * | 1")?;
    println!("strictly M-closed: {}", strictly_closed(&r, &m)?);
    println!("M21-closed: {}", closed(&r, &m21)?);
    println!("strictly M21-closed: {}", strictly_closed(&r, &m21)?);
    println!("M-sharp: {}", sharp(&r, &m));

    let two = PointedSet::new(2)?;
    let trivial = parse_matrix("1 | 1 ; 1 | *")?;
    println!("{trivial}: functional {}, forbidden reduction {}", is_functional(&trivial, two), has_forbidden_reduction(&trivial));

    let goal = parse_matrix("1 1 * | 1 ; * * 1 | 1 ; 1 * 1 | *")?;
    let closure = reflect(&ConcreteRelation::columns_of(&goal)?, &[m]);
    println!("reflection has {} tuples", closure.len());

    for c in run_battery(Level::Fast) {
        println!("{} {} ({} cases)", if c.passed() { "ok" } else { "FAILED" }, c.name, c.cases);
    }
    Ok(())
}
