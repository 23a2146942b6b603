use std::collections::HashMap;

use super::Mesh;
use crate::scalar::Real;

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Groups boundary faces into connected surfaces, where two faces are adjacent iff
/// they share an edge.
///
/// The exterior component (the one holding the boundary face with the
/// lexicographically largest centroid) comes first; the rest are ordered by their
/// smallest face id. Face ids inside a component are sorted.
pub fn detect_boundary_components<T: Real>(mesh: &Mesh<T>) -> Vec<Vec<usize>> {
    let boundary: Vec<usize> = mesh
        .faces
        .iter()
        .filter(|f| f.is_boundary())
        .map(|f| f.id)
        .collect();
    if boundary.is_empty() {
        return Vec::new();
    }

    let mut parent: Vec<usize> = (0..boundary.len()).collect();
    let mut edge_owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (slot, &f) in boundary.iter().enumerate() {
        let loop_ = mesh.faces[f].vertex_ids;
        for i in 0..4 {
            let (a, b) = (loop_[i], loop_[(i + 1) % 4]);
            let edge = (a.min(b), a.max(b));
            match edge_owner.get(&edge) {
                Some(&other) => {
                    let (ra, rb) = (find(&mut parent, slot), find(&mut parent, other));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
                None => {
                    edge_owner.insert(edge, slot);
                }
            }
        }
    }

    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for slot in 0..boundary.len() {
        let root = find(&mut parent, slot);
        groups.entry(root).or_default().push(boundary[slot]);
    }
    let mut components: Vec<Vec<usize>> = groups.into_values().collect();
    for c in components.iter_mut() {
        c.sort_unstable();
    }
    components.sort_by_key(|c| c[0]);

    let key = |f: usize| mesh.faces[f].centroid.to_array();
    let extreme = boundary
        .iter()
        .copied()
        .max_by(|&a, &b| {
            key(a)
                .partial_cmp(&key(b))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("non-empty boundary");
    let exterior = components
        .iter()
        .position(|c| c.binary_search(&extreme).is_ok())
        .expect("extreme face belongs to a component");
    let ext = components.remove(exterior);
    components.insert(0, ext);
    components
}
