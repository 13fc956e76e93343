/** Bootstrap: pick a set and annotator, load the session, wire keyboard shortcuts. */

import { HttpServiceClient } from "./api.js";
import { PairController } from "./controller.js";
import { PairView } from "./render.js";

async function start(): Promise<void> {
    const params = new URLSearchParams(window.location.search);
    const service = new HttpServiceClient(params.get("service") ?? "");
    const annotator = params.get("annotator") ?? "anon";

    const sets = await service.listSets();
    if (sets.length === 0) {
        document.body.textContent = "the service has no verse sets";
        return;
    }
    const setId = params.get("set") ?? sets[0].id;
    const progress = await service.progress(setId, annotator);

    const controller = new PairController(service, setId, annotator);
    await controller.load(Math.min(Math.max(progress.current, 1), progress.total));

    const view = new PairView(document.getElementById("app")!, controller);
    view.render();

    document.addEventListener("keydown", (event) => {
        const run = async () => {
            if (event.key === "n") await controller.navigate("next");
            else if (event.key === "p") await controller.navigate("prev");
            else if (event.key === "r") await controller.navigate("reload");
            else if (event.key === "l" || event.key === "Enter") await controller.commitLink();
            else return;
            view.render();
        };
        void run();
    });
}

void start();
