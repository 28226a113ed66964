use std::path::PathBuf;

use hullcache::hull::{build_hull, load_mesh, sample_sphere, PointSet};

use crate::backends::Backends;
use crate::config::BenchConfig;
use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedFile {
    pub path: PathBuf,
    pub bytes: usize,
}

/// Builds hulls for every configured size and mesh and writes their layout
/// pools into the output directory: `<name>.ic.hcl`, `<name>.ft.hcl` and
/// `<name>.se.hcl`. Face layouts are omitted when over capacity.
pub fn gen_hull(cfg: &BenchConfig) -> Result<Vec<GeneratedFile>> {
    cfg.validate()?;
    let dir = cfg
        .output_path
        .clone()
        .ok_or_else(|| BenchError::Config("gen-hull needs --out <directory>".into()))?;
    std::fs::create_dir_all(&dir)?;

    let mut inputs: Vec<(String, PointSet)> = Vec::new();
    for &n in &cfg.hull_sizes {
        inputs.push((format!("sphere-{n}"), sample_sphere(n, cfg.seed)?));
    }
    for p in &cfg.mesh_paths {
        let ps = load_mesh(p)?;
        inputs.push((ps.source_label.clone(), ps));
    }

    let mut written = Vec::new();
    for (name, ps) in inputs {
        let hull = build_hull(&ps)?;
        let b = Backends::build(&hull)?;
        let mut files = vec![("ic", b.internally_connected.to_bytes())];
        if let Some(ft) = &b.face_traversing {
            files.push(("ft", ft.to_bytes()));
        }
        if let Some(se) = &b.spherical {
            files.push(("se", se.to_bytes()));
        }
        for (ext, bytes) in files {
            let path = dir.join(format!("{name}.{ext}.hcl"));
            std::fs::write(&path, &bytes)?;
            written.push(GeneratedFile {
                path,
                bytes: bytes.len(),
            });
        }
    }
    Ok(written)
}
