// Writes the synthetic stent-like lattice tube used as the stl case fixture.
//
//   make_lattice_tube <out.stl> [--ascii]

#include <tlsph/geometry.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv)
{
    CLI::App app{"Generate a voxelized lattice tube STL"};
    std::string path;
    bool ascii = false;
    tlsph::LatticeTubeParameters params;
    app.add_option("output", path, "output STL path")->required();
    app.add_flag("--ascii", ascii, "write ASCII instead of binary");
    app.add_option("--outer-radius", params.outer_radius);
    app.add_option("--inner-radius", params.inner_radius);
    app.add_option("--length", params.length);
    app.add_option("--voxel", params.voxel);
    CLI11_PARSE(app, argc, argv);

    try
    {
        const tlsph::TriangleMesh mesh = tlsph::make_lattice_tube_mesh(params);
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw tlsph::IoError("cannot write '" + path + "'");
        out << (ascii ? tlsph::serialize_stl_ascii(mesh, "lattice_tube") : tlsph::serialize_stl_binary(mesh));
        std::cout << mesh.size() << " triangles written to " << path << '\n';
    }
    catch (const tlsph::Error &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
