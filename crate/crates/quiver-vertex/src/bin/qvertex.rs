fn main() {
    std::process::exit(quiver_vertex::cli::main());
}
