//! OBJ-subset mesh export of the surface lift: one `v` line per chart-valid
//! grid node in row-major order, one quad `f` line per grid cell whose four
//! corners are all chart-valid, and a header comment carrying the config
//! hash so a mesh can be traced back to the exact run that produced it.

use projframe::frame::LiftPoint;
use projframe::surface::Grid;

use crate::output::fmt_f;

/// Vertex and face counts of an exported mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshStats {
    pub vertices: usize,
    pub faces: usize,
}

/// Render the lift as OBJ text. Vertices are the affine-chart coordinates;
/// nodes whose chart is undefined are skipped, and faces touching them are
/// dropped. Indices are 1-based per the OBJ convention.
pub fn obj_string(lift: &Grid<LiftPoint>, config_hash: &str) -> (String, MeshStats) {
    let (nx, ny) = (lift.nx, lift.ny);
    let mut text = String::new();
    text.push_str("# surface lift mesh\n");
    text.push_str(&format!("# config sha256: {config_hash}\n"));

    // Vertices in storage (row-major) order, remembering each node's 1-based
    // index so faces can refer back to it.
    let mut index = vec![0usize; nx * ny];
    let mut vertices = 0usize;
    for j in 0..ny {
        for i in 0..nx {
            if let Some([x, y, z]) = lift.at(i, j).chart {
                vertices += 1;
                index[j * nx + i] = vertices;
                text.push_str(&format!("v {} {} {}\n", fmt_f(x), fmt_f(y), fmt_f(z)));
            }
        }
    }

    let mut faces = 0usize;
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let corners = [
                index[j * nx + i],
                index[j * nx + i + 1],
                index[(j + 1) * nx + i + 1],
                index[(j + 1) * nx + i],
            ];
            if corners.iter().all(|&c| c != 0) {
                faces += 1;
                text.push_str(&format!(
                    "f {} {} {} {}\n",
                    corners[0], corners[1], corners[2], corners[3]
                ));
            }
        }
    }
    (text, MeshStats { vertices, faces })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(valid: bool) -> LiftPoint {
        LiftPoint {
            homogeneous: [1.0, 0.5, 0.25, 0.125],
            chart: valid.then_some([0.5, 0.25, 0.125]),
        }
    }

    #[test]
    fn skips_invalid_nodes_and_their_faces() {
        // 3 x 2 grid with the middle-top node invalid: 5 vertices, and both
        // cells touch the invalid corner, so no faces survive.
        let lift = Grid::from_fn(3, 2, |i, j| point(!(i == 1 && j == 1)));
        let (text, stats) = obj_string(&lift, "abc123");
        assert_eq!(stats, MeshStats { vertices: 5, faces: 0 });
        assert!(text.starts_with("# surface lift mesh\n# config sha256: abc123\n"));
        assert_eq!(text.matches("\nv ").count(), 5);
        assert!(!text.contains("\nf "));
    }

    #[test]
    fn full_grid_counts_and_indexing() {
        let lift = Grid::from_fn(3, 3, |_, _| point(true));
        let (text, stats) = obj_string(&lift, "h");
        assert_eq!(stats, MeshStats { vertices: 9, faces: 4 });
        // First cell uses the first row pair and the node right above them.
        assert!(text.contains("f 1 2 5 4\n"));
        assert!(text.ends_with("f 5 6 9 8\n"));
    }
}
