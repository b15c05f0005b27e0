fn main() {
    discrete_riemann::cli::main()
}
