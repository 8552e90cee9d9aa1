//! Builds the binding interaction graph under each interaction profile.
use qdock::ligraph::{build_big, build_ldg, BigOptions, PotentialTable, Profile};
use qdock::pharmio::{parse_pdb_atoms, parse_pharmacophore_spec, resolve_points, PharmacophorePoint};

fn points(dir: &str, pdb: &str, spec: &str) -> qdock::Result<Vec<PharmacophorePoint>> {
    let atoms = parse_pdb_atoms(&std::fs::read_to_string(format!("{dir}/{pdb}")).unwrap())?;
    let spec = parse_pharmacophore_spec(&std::fs::read_to_string(format!("{dir}/{spec}")).unwrap())?;
    resolve_points(&spec, &atoms)
}

fn main() -> qdock::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data");
    let ligand = build_ldg(&points(dir, "ligand.pdb", "ligand.json")?)?;
    let protein = build_ldg(&points(dir, "protein.pdb", "protein.json")?)?;
    for profile in [Profile::Skh8, Profile::Hac3, Profile::F4l5] {
        for shared in [false, true] {
            let big = build_big(
                &ligand,
                &protein,
                &profile.params(),
                &PotentialTable::default(),
                BigOptions { allow_shared_points: shared },
            )?;
            println!(
                "{profile:?} shared={shared}: {} vertices, {} edges",
                big.len(),
                big.edges().len()
            );
        }
    }
    Ok(())
}
