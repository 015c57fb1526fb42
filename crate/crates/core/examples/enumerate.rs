//! Enumerating a window: classes, order, localization groups, DOT output.
//!
//! Usage: `cargo run --release --example enumerate -- [n m k]`

use mclex::enumeration::{enumerate, loc_anchors, subposet_by_localization, ClassifyOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let (n, m, k) = match args.as_slice() {
        [n, m, k] => (*n, *m, *k),
        _ => (2, 3, 2),
    };
    let g = enumerate(n, m, k, &ClassifyOptions::default())?;
    println!("{} classes, {} covering pairs", g.classes.len(), g.reduced_edges.len());
    for (i, c) in g.classes.iter().enumerate() {
        println!("  c{i}: {}", c.canonical);
    }
    for (a, b) in &g.reduced_edges {
        println!("  c{a} < c{b}");
    }
    for grp in &g.groups {
        println!("  [{}] {:?}", grp.label, grp.class_ids);
    }
    for (name, anchor) in loc_anchors() {
        let sub = subposet_by_localization(&g, &anchor)?;
        println!("localizing to {name}: {}", sub.classes.len());
    }
    print!("{}", g.to_dot());
    Ok(())
}
