fn main() {
    // Dense nonsymmetric eigensolves and LU factorizations go through the
    // reference LAPACK shipped with the system (single-threaded, bit-stable
    // run to run).
    println!("cargo:rustc-link-lib=lapack");
    println!("cargo:rustc-link-lib=blas");
}
