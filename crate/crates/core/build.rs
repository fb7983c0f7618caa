fn main() {
    // LAPACK from the system (reference LAPACK or OpenBLAS); override the
    // library name with SSH_LINDBLAD_LAPACK_LIB when it differs.
    println!("cargo:rerun-if-env-changed=SSH_LINDBLAD_LAPACK_LIB");
    let lib = std::env::var("SSH_LINDBLAD_LAPACK_LIB").unwrap_or_else(|_| "lapack".to_string());
    println!("cargo:rustc-link-lib=dylib={lib}");
}
