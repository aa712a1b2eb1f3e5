//! The five-vertex, three-hyperedge example: incidence, degrees and the
//! line-graph matrices.

use dlglab::cli::matrix_csv;
use dlglab::{directed_laplacians, undirected_laplacian, ComplexMatrix};

fn show(name: &str, m: &ComplexMatrix) {
    println!("{name}:");
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|z| format!("{:>7.3}{:+.3}i", z.re, z.im)).collect();
        println!("  {}", cells.join("  "));
    }
}

fn main() {
    let h = dlglab::hypergraph::worked_example();
    let deg = h.degrees();
    println!("vertex degrees {:?}, hyperedge densities {:?}", deg.vertex, deg.density);
    show("incidence", &h.incidence_matrix());

    let mats = directed_laplacians(&h);
    show("adjacency", &mats.adjacency);
    show("laplacian", &mats.laplacian);
    show("signless laplacian", &mats.signless);
    show("undirected laplacian", &undirected_laplacian(&h));

    print!("laplacian as CSV:\n{}", matrix_csv(&mats.laplacian));
}
