#include "curlcurl/mesh.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace curlcurl
{

namespace
{

class LineReader
{
public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// Next non-empty line with comments stripped; throws at end of input.
  std::istringstream next(const char* expecting)
  {
    std::string line;
    while (std::getline(in_, line))
    {
      ++line_;
      if (const auto hash = line.find('#'); hash != std::string::npos)
        line.erase(hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        return std::istringstream(line);
    }
    throw MeshFormatError(line_ + 1, std::string("unexpected end of file, expected ") + expecting);
  }

  /// Throws if anything other than blank lines and comments remains.
  void expect_end()
  {
    std::string line;
    while (std::getline(in_, line))
    {
      ++line_;
      if (const auto hash = line.find('#'); hash != std::string::npos)
        line.erase(hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw MeshFormatError(line_, "trailing content after boundary section");
    }
  }

  int line() const { return line_; }

private:
  std::istream& in_;
  int line_ = 0;
};

template <typename T>
T read_value(std::istringstream& ss, int line, const char* what)
{
  T value;
  if (!(ss >> value))
    throw MeshFormatError(line, std::string("expected ") + what);
  return value;
}

void expect_eol(std::istringstream& ss, int line)
{
  std::string rest;
  if (ss >> rest)
    throw MeshFormatError(line, "unexpected token '" + rest + "'");
}

int read_section(LineReader& reader, const std::string& keyword)
{
  auto ss = reader.next(keyword.c_str());
  const auto word = read_value<std::string>(ss, reader.line(), keyword.c_str());
  if (word != keyword)
    throw MeshFormatError(reader.line(), "expected '" + keyword + "', found '" + word + "'");
  const long count = read_value<long>(ss, reader.line(), "a count");
  if (count < 0 || count > std::numeric_limits<int>::max())
    throw MeshFormatError(reader.line(), "invalid count " + std::to_string(count));
  expect_eol(ss, reader.line());
  return static_cast<int>(count);
}

} // namespace

Mesh read_mesh(std::istream& in)
{
  LineReader reader(in);
  {
    auto ss = reader.next("header");
    const auto magic = read_value<std::string>(ss, reader.line(), "header");
    const auto version = read_value<std::string>(ss, reader.line(), "format version");
    if (magic != "tetmesh" || version != "1")
      throw MeshFormatError(reader.line(), "expected header 'tetmesh 1'");
    expect_eol(ss, reader.line());
  }

  const int nv = read_section(reader, "vertices");
  std::vector<Vec3> vertices(nv);
  for (auto& x : vertices)
  {
    auto ss = reader.next("vertex coordinates");
    for (int d = 0; d < 3; ++d)
      x[d] = read_value<double>(ss, reader.line(), "three coordinates");
    expect_eol(ss, reader.line());
  }

  const int nt = read_section(reader, "tets");
  std::vector<std::array<int, 4>> tets(nt);
  for (auto& t : tets)
  {
    auto ss = reader.next("cell vertex indices");
    for (int& v : t)
    {
      v = read_value<int>(ss, reader.line(), "four vertex indices");
      if (v < 0 || v >= nv)
        throw MeshFormatError(reader.line(), "vertex index " + std::to_string(v) + " out of range");
    }
    expect_eol(ss, reader.line());
  }

  const int nb = read_section(reader, "boundary");
  std::vector<BoundaryFace> boundary(nb);
  for (auto& bf : boundary)
  {
    auto ss = reader.next("boundary face");
    for (int& v : bf.vertices)
    {
      v = read_value<int>(ss, reader.line(), "three vertex indices");
      if (v < 0 || v >= nv)
        throw MeshFormatError(reader.line(), "vertex index " + std::to_string(v) + " out of range");
    }
    const auto tag = read_value<std::string>(ss, reader.line(), "boundary tag D or N");
    if (tag == "D")
      bf.tag = BoundaryTag::Dirichlet;
    else if (tag == "N")
      bf.tag = BoundaryTag::Neumann;
    else
      throw MeshFormatError(reader.line(), "unknown boundary tag '" + tag + "'");
    expect_eol(ss, reader.line());
  }
  reader.expect_end();
  return build_mesh(std::move(vertices), std::move(tets), boundary);
}

Mesh read_mesh_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw MeshError("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh)
{
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  out << "tetmesh 1\n";
  out << "vertices " << mesh.num_vertices() << '\n';
  for (const auto& x : mesh.vertices())
    out << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
  out << "tets " << mesh.num_tets() << '\n';
  for (int t = 0; t < mesh.num_tets(); ++t)
  {
    const auto& v = mesh.tet(t);
    out << v[0] << ' ' << v[1] << ' ' << v[2] << ' ' << v[3] << '\n';
  }
  const auto faces = boundary_faces(mesh);
  out << "boundary " << faces.size() << '\n';
  for (const auto& bf : faces)
    out << bf.vertices[0] << ' ' << bf.vertices[1] << ' ' << bf.vertices[2] << ' '
        << (bf.tag == BoundaryTag::Dirichlet ? 'D' : 'N') << '\n';
  out.flags(flags);
  out.precision(precision);
}

} // namespace curlcurl
