//! Cotangent-Laplacian mean curvature on closed triangle meshes.

use crate::error::Result;
use crate::surface::{cross, dot3, norm3, sub3, SurfaceMesh};

fn cot(a: [f64; 3], b: [f64; 3]) -> f64 {
    dot3(a, b) / norm3(cross(a, b))
}

/// Per-vertex mean curvature `H = (Δx · ν) / 2` with the mixed Voronoi area,
/// positive for a sphere. `ν` is the area-weighted normal of the outward
/// wound faces.
pub fn discrete_mean_curvature(mesh: &SurfaceMesh) -> Result<Vec<f64>> {
    mesh.check_faces()?;
    let nv = mesh.vertices.len();
    let mut lap = vec![[0.0; 3]; nv];
    let mut area = vec![0.0; nv];
    let mut normal = vec![[0.0; 3]; nv];

    for f in &mesh.faces {
        let p = f.map(|i| mesh.vertices[i]);
        let fn_ = cross(sub3(p[1], p[0]), sub3(p[2], p[0]));
        let face_area = 0.5 * norm3(fn_);
        // cot of the angle at each corner
        let mut cots = [0.0; 3];
        let mut obtuse = None;
        for k in 0..3 {
            let (a, b, c) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
            let (u, v) = (sub3(b, a), sub3(c, a));
            cots[k] = cot(u, v);
            if dot3(u, v) < 0.0 {
                obtuse = Some(k);
            }
        }
        for k in 0..3 {
            let (i, j) = (f[(k + 1) % 3], f[(k + 2) % 3]);
            let e = sub3(mesh.vertices[i], mesh.vertices[j]);
            let w = 0.5 * cots[k];
            for c in 0..3 {
                lap[i][c] += w * e[c];
                lap[j][c] -= w * e[c];
            }
            normal[f[k]].iter_mut().zip(fn_).for_each(|(a, b)| *a += b);
        }
        match obtuse {
            None => {
                for k in 0..3 {
                    let (i, j) = ((k + 1) % 3, (k + 2) % 3);
                    // Voronoi share of corner i from edges (i, j) and (i, k)
                    let l_ij = dot3(sub3(p[j], p[i]), sub3(p[j], p[i]));
                    let l_ik = dot3(sub3(p[k], p[i]), sub3(p[k], p[i]));
                    area[f[i]] += (l_ij * cots[k] + l_ik * cots[j]) / 8.0;
                }
            }
            Some(o) => {
                for k in 0..3 {
                    area[f[k]] += if k == o { 0.5 * face_area } else { 0.25 * face_area };
                }
            }
        }
    }

    Ok((0..nv)
        .map(|v| {
            let nn = norm3(normal[v]);
            let nu = normal[v].map(|x| x / nn);
            let k = lap[v].map(|x| x / area[v]);
            0.5 * dot3(k, nu)
        })
        .collect())
}
