//! Writes the shipped scenario graphs as JSON documents and reads them back.
//!
//! `cargo run --example export_graphs -- examples/data`

use potgraph::{io, scenarios};

fn main() -> potgraph::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "examples/data".into());
    std::fs::create_dir_all(&dir).map_err(|e| potgraph::Error::Io(e.to_string()))?;
    let graphs = [
        ("standard_ray", scenarios::standard_ray()),
        ("unit_line", scenarios::unit_line()),
        ("two_sided_line", scenarios::two_sided_line()),
        ("surgery_base", scenarios::surgery_base()),
    ];
    for (name, e) in graphs {
        let path = format!("{dir}/{name}.json");
        io::save(&e, &path)?;
        assert_eq!(io::load(&path)?, e);
        println!("{path}: {} core vertices, {} rays", e.core.len(), e.rays.len());
    }
    Ok(())
}
