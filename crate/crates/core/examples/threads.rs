//! Train tracks: ◊ edges chained through opposite sides of each rhombus. On
//! a critical map every thread keeps one direction; on a torus each closed
//! thread has a homology class.
//!
//!     cargo run --example threads

use discrete_riemann::critical::threads::{is_convex, thread_class, thread_direction, train_tracks};
use discrete_riemann::critical::{square_rectangle, tri_hex_torus, TriHexParams};
use discrete_riemann::homology::canonical_dissection;

fn main() -> discrete_riemann::error::Result<()> {
    let m = tri_hex_torus(TriHexParams::equilateral(), 3, 3)?;
    let d = canonical_dissection(&m.complex, m.basis_hint.as_deref().unwrap())?;
    let threads = train_tracks(&m.complex);
    println!("triangular/hexagonal torus: {} threads", threads.len());
    for t in &threads {
        let (dir, dev) = thread_direction(&m, t);
        println!(
            "  {} edges, closed {}, direction {:.3} (deviation {dev:.0e}), class {:?}",
            t.edges.len(),
            t.closed,
            dir,
            thread_class(&m.complex, t, &d)
        );
    }

    let r = square_rectangle(4, 3, 0.6)?;
    let tracks = train_tracks(&r.complex);
    let all: Vec<usize> = (0..r.complex.quad_count()).collect();
    let holey: Vec<usize> = all.iter().copied().filter(|&q| q != 5).collect();
    println!("rectangle: {} threads, whole convex {}, with a hole convex {}", tracks.len(), is_convex(&r.complex, &tracks, &all), is_convex(&r.complex, &tracks, &holey));
    Ok(())
}
