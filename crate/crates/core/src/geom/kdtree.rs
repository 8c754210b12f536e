//! Exact k-nearest-neighbor search over a 3D point set.
//!
//! Results are bit-deterministic: ties in distance are broken by point
//! index, so queries always agree with an exhaustive scan ordered by
//! `(distance, index)`.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::scalar::Real;

const LEAF_SIZE: usize = 16;

/// One query result: index into the indexed cloud plus Euclidean distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor<T> {
    pub index: usize,
    pub distance: T,
}

#[derive(Debug, Clone)]
enum Node<T> {
    Split {
        axis: usize,
        value: T,
        left: u32,
        right: u32,
    },
    Leaf {
        start: u32,
        end: u32,
    },
}

/// Static k-d tree over a copy of the input points.
#[derive(Debug, Clone)]
pub struct KdTree<T: Real> {
    points: Vec<Vector3<T>>,
    order: Vec<u32>,
    nodes: Vec<Node<T>>,
    root: u32,
}

impl<T: Real> KdTree<T> {
    pub fn build(points: &[Vector3<T>]) -> Self {
        let mut order: Vec<u32> = (0..points.len() as u32).collect();
        let mut nodes = Vec::new();
        let root = if points.is_empty() {
            0
        } else {
            let n = points.len();
            build_node(points, &mut order, 0, n, &mut nodes)
        };
        KdTree {
            points: points.to_vec(),
            order,
            nodes,
            root,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, index: usize) -> &Vector3<T> {
        &self.points[index]
    }

    /// The `min(k, len)` nearest points to `q`, in nondecreasing distance
    /// order (ties by index).
    pub fn knn(&self, q: &Vector3<T>, k: usize) -> Result<Vec<Neighbor<T>>> {
        if k == 0 {
            return Err(Error::InvalidArgument("knn requires k >= 1".into()));
        }
        if self.is_empty() {
            return Err(Error::EmptyInput("spatial index holds no points".into()));
        }
        let mut best = BoundedSet::new(k.min(self.points.len()));
        self.search(self.root, q, &mut best);
        Ok(best.into_sorted(|d2| d2.sqrt()))
    }

    /// Nearest single point, or `None` on an empty index.
    pub fn nearest(&self, q: &Vector3<T>) -> Option<Neighbor<T>> {
        if self.is_empty() {
            return None;
        }
        let mut best = BoundedSet::new(1);
        self.search(self.root, q, &mut best);
        best.into_sorted(|d2| d2.sqrt()).into_iter().next()
    }

    fn search(&self, node: u32, q: &Vector3<T>, best: &mut BoundedSet<T>) {
        match &self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                for &idx in &self.order[*start as usize..*end as usize] {
                    let d2 = (self.points[idx as usize] - q).norm_squared();
                    best.offer(d2, idx as usize);
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let delta = q[*axis] - *value;
                let (near, far) = if delta <= T::zero() {
                    (*left, *right)
                } else {
                    (*right, *left)
                };
                self.search(near, q, best);
                // An equal plane distance can still yield a smaller-index tie.
                if !best.full() || delta * delta <= best.worst_d2() {
                    self.search(far, q, best);
                }
            }
        }
    }
}

fn build_node<T: Real>(
    points: &[Vector3<T>],
    order: &mut [u32],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node<T>>,
) -> u32 {
    let len = end - start;
    if len <= LEAF_SIZE {
        nodes.push(Node::Leaf {
            start: start as u32,
            end: end as u32,
        });
        return (nodes.len() - 1) as u32;
    }

    // Split along the axis of largest extent, at the median.
    let mut lo = points[order[start] as usize];
    let mut hi = lo;
    for &idx in &order[start..end] {
        let p = points[idx as usize];
        for a in 0..3 {
            if p[a] < lo[a] {
                lo[a] = p[a];
            }
            if p[a] > hi[a] {
                hi[a] = p[a];
            }
        }
    }
    let extent = hi - lo;
    let mut axis = 0;
    for a in 1..3 {
        if extent[a] > extent[axis] {
            axis = a;
        }
    }

    let mid = start + len / 2;
    order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
        let (pa, pb) = (points[a as usize][axis], points[b as usize][axis]);
        pa.partial_cmp(&pb).unwrap().then(a.cmp(&b))
    });
    let split_value = points[order[mid] as usize][axis];

    let slot = nodes.len() as u32;
    nodes.push(Node::Leaf { start: 0, end: 0 }); // placeholder
    let left = build_node(points, order, start, mid, nodes);
    let right = build_node(points, order, mid, end, nodes);
    nodes[slot as usize] = Node::Split {
        axis,
        value: split_value,
        left,
        right,
    };
    slot
}

/// Fixed-capacity set of the k smallest `(d2, index)` pairs, ordered
/// lexicographically. Small k: a plain vector beats a heap here.
struct BoundedSet<T> {
    cap: usize,
    items: Vec<(T, usize)>,
}

impl<T: Real> BoundedSet<T> {
    fn new(cap: usize) -> Self {
        BoundedSet {
            cap,
            items: Vec::with_capacity(cap + 1),
        }
    }

    fn full(&self) -> bool {
        self.items.len() == self.cap
    }

    fn worst_d2(&self) -> T {
        // Only meaningful once the set is full; callers check that first.
        self.items.last().expect("bounded set consulted while empty").0
    }

    fn offer(&mut self, d2: T, index: usize) {
        if self.full() {
            let worst = *self.items.last().unwrap();
            if (d2, index) >= worst {
                return;
            }
            self.items.pop();
        }
        let pos = self
            .items
            .partition_point(|&(od2, oi)| (od2, oi) < (d2, index));
        self.items.insert(pos, (d2, index));
    }

    fn into_sorted(self, dist: impl Fn(T) -> T) -> Vec<Neighbor<T>> {
        self.items
            .into_iter()
            .map(|(d2, index)| Neighbor {
                index,
                distance: dist(d2),
            })
            .collect()
    }
}
