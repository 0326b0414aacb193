fn main() {
    std::process::exit(particle_stats::cli::run());
}
