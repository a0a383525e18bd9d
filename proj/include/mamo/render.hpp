#ifndef MAMO_RENDER_HPP
#define MAMO_RENDER_HPP

#include <mamo/scene.hpp>

#include <string>
#include <vector>

namespace mamo {

struct RenderSpec
{
    const Scene* scene = nullptr;
    const std::vector<WorldState>* trajectory = nullptr;   // optional
    int stride = 1;                 // arm ghost every `stride` states
    std::string movable_color = "#2e8b57";
    std::string immovable_color = "#c0392b";
};

/// Static SVG: the workspace frame, a goal marker, one circle per object
/// (class movable/immovable), and with a trajectory: arm ghosts every
/// `stride` states plus object displacement arrows.
std::string render_svg(const RenderSpec& spec);

} // namespace mamo

#endif
