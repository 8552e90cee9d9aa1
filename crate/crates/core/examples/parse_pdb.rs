//! Reads the toy complex and resolves pharmacophore points.
use qdock::pharmio::{parse_pdb_atoms, parse_pharmacophore_spec, resolve_points};

fn main() -> qdock::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data");
    for (pdb, spec) in [("ligand.pdb", "ligand.json"), ("protein.pdb", "protein.json")] {
        let atoms = parse_pdb_atoms(&std::fs::read_to_string(format!("{dir}/{pdb}")).unwrap())?;
        let spec = parse_pharmacophore_spec(&std::fs::read_to_string(format!("{dir}/{spec}")).unwrap())?;
        println!("{pdb}: {} atoms", atoms.len());
        for p in resolve_points(&spec, &atoms)? {
            let [x, y, z] = p.position;
            println!("  {:<4} {:?} ({x:.3}, {y:.3}, {z:.3})", p.label, p.kind);
        }
    }
    Ok(())
}
