// Writes the sample inputs under data/: SOFF meshes, isotropy files, quadratic
// form spans and system specs.

#include "fibcon/mesh_fixtures.hpp"
#include "fibcon/singularity.hpp"
#include "fibcon/surface_morse.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace fibcon;

namespace {

void write_text(const fs::path& p, const std::string& text)
{
    std::ofstream f(p);
    f << text;
    std::cout << p.string() << "\n";
}

void write_mesh(const fs::path& p, const morse::ScalarMesh& m)
{
    std::ofstream f(p);
    morse::write_soff(f, m);
    std::cout << p.string() << "\n";
}

void write_forms(const fs::path& p, const std::vector<singularity::QuadraticForm>& forms)
{
    std::ofstream f(p);
    for (std::size_t i = 0; i < forms.size(); ++i) {
        if (i)
            f << "\n";
        singularity::write_quadratic_form(f, forms[i]);
    }
    std::cout << p.string() << "\n";
}

} // namespace

int main(int argc, char** argv)
{
    const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("data");
    fs::create_directories(dir);

    write_mesh(dir / "octahedron.soff", morse::fixtures::octahedron());
    write_mesh(dir / "cos_cos_torus_64.soff", morse::fixtures::cos_cos_torus(64));
    write_mesh(dir / "standing_torus_32.soff", morse::fixtures::standing_torus(32));
    write_mesh(dir / "four_saddle_torus_32.soff", morse::fixtures::four_saddle_torus(32));
    write_mesh(dir / "double_bump_sphere.soff", morse::fixtures::double_bump_sphere(3));
    write_mesh(dir / "open_patch.soff", morse::fixtures::grid_patch(4));

    write_text(dir / "z2_model.iso", "# Z/2 acting by -1 on C\nh: 0\ntorsion: [1/2]\n");
    write_text(dir / "weights_1_-1.iso", "h: 1\nweights: [[1,-1]]\n");
    write_text(dir / "weights_1_1.iso", "h: 1\nweights: [[1,1]]\n");
    write_text(dir / "rank_two.iso", "# two lattice directions leave no one-dimensional kernel\nh: 1\nweights: []\n");

    using singularity::QuadraticForm;
    write_forms(dir / "elliptic.qf", {QuadraticForm::elliptic(1, 0)});
    write_forms(dir / "hyperbolic.qf", {QuadraticForm::hyperbolic(1, 0)});
    write_forms(dir / "focus_focus.qf", {QuadraticForm::focus_focus_phi(2, 0, 1), QuadraticForm::focus_focus_g(2, 0, 1)});

    write_text(dir / "ff_model.sys",
               "name=ff_file\nn=2\ndomain=box(-2,2;-2,2;-2,2;-2,2)\n"
               "phi1=0.5*(re1^2 + im1^2 - re2^2 - im2^2)\ng=re1*im2 + re2*im1\n"
               "stabilizer_hints=[0,0,0,0:connected:tall]\n");
    write_text(dir / "torus_cos.sys", "name=torus_cos_file\nn=1\ndomain=torus2\ng=cos(2*pi*x) + cos(2*pi*y)\n");
    write_text(dir / "canonical_pair.sys", "name=canonical_pair\nn=1\ndomain=box(-1,1;-1,1)\ng=x1\n");
    return 0;
}
