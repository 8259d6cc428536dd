fn main() {
    if let Some(n) = std::env::var("COOCMAP_THREADS").ok().and_then(|v| v.parse().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    std::process::exit(coocmap::cli::main_with_args(std::env::args_os().collect()));
}
