//! Deterministic CSV and legacy-VTK writers. All floats are printed with
//! a fixed format so identical runs produce byte-identical files.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use chpfem::mesh::{DofMap, Mesh};
use chpfem::solver::{DiagRow, State};
use chpfem::{Error, Result};

pub fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .map_err(|e| Error::Parameter(format!("cannot create {}: {e}", dir.display())))?;
    }
    let file = fs::File::create(path)
        .map_err(|e| Error::Parameter(format!("cannot write {}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn io_err(e: std::io::Error) -> Error {
    Error::Parameter(format!("write failed: {e}"))
}

pub fn write_diagnostics(path: &Path, rows: &[DiagRow]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "step,t,energy,mass,min_u,max_u,newton_iters,krylov_iters").map_err(io_err)?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.step,
            fmt(r.t),
            fmt(r.energy),
            fmt(r.mass),
            fmt(r.min_u),
            fmt(r.max_u),
            r.newton_iters,
            r.krylov_iters
        )
        .map_err(io_err)?;
    }
    Ok(())
}

/// Point-cloud CSV (x, y, u, w) in global DoF order, for segments and
/// imported meshes.
pub fn write_state_csv(path: &Path, state: &State, dofs: &DofMap) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "x,y,u,w").map_err(io_err)?;
    for (i, c) in dofs.dof_coords().iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{}",
            fmt(c[0]),
            fmt(c[1]),
            fmt(state.u[i]),
            fmt(state.w[i])
        )
        .map_err(io_err)?;
    }
    Ok(())
}

/// Legacy-VTK structured grid over the tensor DoF grid of a rectangle
/// mesh, with u and w as point data.
pub fn write_state_vtk(
    path: &Path,
    state: &State,
    mesh: &Mesh,
    dofs: &DofMap,
    nx: usize,
    ny: usize,
) -> Result<()> {
    let p = dofs.degree();
    let gx = p * nx + 1;
    let gy = p * ny + 1;
    // structured grid index -> global dof, through the owning element
    let dof_at = |i: usize, j: usize| -> usize {
        let ex = (i / p).min(nx - 1);
        let ey = (j / p).min(ny - 1);
        let li = i - p * ex;
        let lj = j - p * ey;
        dofs.global_ids(ey * nx + ex)[lj * (p + 1) + li]
    };
    let mut w = create(path)?;
    writeln!(w, "# vtk DataFile Version 3.0").map_err(io_err)?;
    writeln!(w, "chpfem field at t = {}", fmt(state.t)).map_err(io_err)?;
    writeln!(w, "ASCII").map_err(io_err)?;
    writeln!(w, "DATASET STRUCTURED_GRID").map_err(io_err)?;
    writeln!(w, "DIMENSIONS {gx} {gy} 1").map_err(io_err)?;
    writeln!(w, "POINTS {} double", gx * gy).map_err(io_err)?;
    for j in 0..gy {
        for i in 0..gx {
            let c = dofs.dof_coords()[dof_at(i, j)];
            writeln!(w, "{} {} 0", fmt(c[0]), fmt(c[1])).map_err(io_err)?;
        }
    }
    writeln!(w, "POINT_DATA {}", gx * gy).map_err(io_err)?;
    for (name, field) in [("u", &state.u), ("w", &state.w)] {
        writeln!(w, "SCALARS {name} double 1").map_err(io_err)?;
        writeln!(w, "LOOKUP_TABLE default").map_err(io_err)?;
        for j in 0..gy {
            for i in 0..gx {
                writeln!(w, "{}", fmt(field[dof_at(i, j)])).map_err(io_err)?;
            }
        }
    }
    let _ = mesh;
    Ok(())
}

/// Write one row per line from (name, columns) data.
pub fn write_csv(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{header}").map_err(io_err)?;
    for row in rows {
        writeln!(w, "{}", row.join(",")).map_err(io_err)?;
    }
    Ok(())
}
