// three.js presentation layer. Consumes AreaBuffers verbatim; adds borders,
// billboarded labels, leader lines for comparison targets, highlighted
// region outlines and a soft shadow pass that engages once prisms have
// height. Recovers from WebGL context loss by pausing and reinitializing.

import * as THREE from "three";
import type { SceneFile } from "./types.js";
import { maxHeight, sceneBuffers } from "./sceneGeometry.js";

const MAP_SIZE_M = 1.0; // unit map quad renders at 1 m x 1 m

export class Renderer {
  readonly scene = new THREE.Scene();
  readonly camera: THREE.PerspectiveCamera;
  readonly webgl: THREE.WebGLRenderer;
  readonly mapGroup = new THREE.Group();
  private labelSprites = new THREE.Group();
  private leaders = new THREE.Group();
  private light: THREE.DirectionalLight;
  private paused = false;

  constructor(readonly canvas: HTMLCanvasElement) {
    this.webgl = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.webgl.setPixelRatio(window.devicePixelRatio);
    this.webgl.shadowMap.enabled = false;
    this.webgl.shadowMap.type = THREE.PCFSoftShadowMap;
    this.camera = new THREE.PerspectiveCamera(60, canvas.clientWidth / canvas.clientHeight, 0.01, 50);
    this.camera.position.set(0, 1.3, 1.1);
    this.camera.lookAt(0, 0.9, 0);
    this.scene.background = new THREE.Color(0x10131a);
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.75));
    this.light = new THREE.DirectionalLight(0xffffff, 1.4);
    this.light.position.set(1.5, 3, 1);
    this.light.castShadow = true;
    this.light.shadow.mapSize.set(1024, 1024);
    this.scene.add(this.light);
    this.scene.add(this.mapGroup);
    this.mapGroup.add(this.labelSprites);
    this.mapGroup.add(this.leaders);
    // default map placement: 0.6 m ahead of the camera start, 0.1 m below
    this.mapGroup.position.set(-MAP_SIZE_M / 2, 0.8, -MAP_SIZE_M / 2 + 0.2);

    canvas.addEventListener("webglcontextlost", (ev) => {
      ev.preventDefault();
      this.paused = true;
    });
    canvas.addEventListener("webglcontextrestored", () => {
      this.paused = false;
    });
  }

  /** Replace the displayed geometry with a freshly fetched scene. */
  showScene(scene: SceneFile, highlight: string[] = []): void {
    const keep = new Set([this.labelSprites.id, this.leaders.id]);
    for (const child of [...this.mapGroup.children]) {
      if (!keep.has(child.id)) {
        this.mapGroup.remove(child);
        disposeDeep(child);
      }
    }
    this.labelSprites.clear();
    this.leaders.clear();

    const wantShadows = maxHeight(scene) > 1e-6;
    this.webgl.shadowMap.enabled = wantShadows;

    const highlighted = new Set(highlight);
    for (const buf of sceneBuffers(scene)) {
      const geometry = new THREE.BufferGeometry();
      geometry.setAttribute("position", new THREE.BufferAttribute(buf.positions, 3));
      geometry.setIndex(new THREE.BufferAttribute(buf.indices, 1));
      geometry.computeVertexNormals();
      const material = new THREE.MeshLambertMaterial({
        color: new THREE.Color(buf.color[0], buf.color[1], buf.color[2]),
        side: THREE.FrontSide,
      });
      const mesh = new THREE.Mesh(geometry, material);
      mesh.castShadow = wantShadows;
      mesh.receiveShadow = wantShadows;
      mesh.name = `area:${buf.id}`;
      this.mapGroup.add(mesh);

      if (buf.border) {
        const lineGeom = new THREE.BufferGeometry();
        lineGeom.setAttribute("position", new THREE.BufferAttribute(buf.positions, 3));
        lineGeom.setIndex(new THREE.BufferAttribute(buf.outline, 1));
        const hot = highlighted.has(buf.id);
        const lineMat = new THREE.LineBasicMaterial({
          color: hot ? 0xff3355 : 0x272727,
          linewidth: hot ? 3 : 1,
        });
        const lines = new THREE.LineSegments(lineGeom, lineMat);
        lines.position.y += 0.0005; // keep borders above the fill
        this.mapGroup.add(lines);
      }
    }

    // labels parallel the area list; billboarding is inherent to sprites
    scene.labels.forEach((label, i) => {
      const sprite = makeTextSprite(label.text);
      sprite.position.set(label.anchor[0], label.anchor[2] + 0.015, -label.anchor[1]);
      sprite.name = `label:${label.text}`;
      const areaId = scene.areas[i]?.id;
      sprite.visible = areaId !== undefined && highlighted.has(areaId);
      this.labelSprites.add(sprite);
    });

    // straight leader lines from above for comparison targets
    if (highlight.length === 2) {
      for (const id of highlight) {
        const idx = scene.areas.findIndex((a) => a.id === id);
        if (idx < 0) continue;
        const anchor = scene.labels[idx]?.anchor ?? [0.5, 0.5, 0];
        const from = new THREE.Vector3(anchor[0], anchor[2] + 0.18, -anchor[1]);
        const to = new THREE.Vector3(anchor[0], anchor[2], -anchor[1]);
        const geom = new THREE.BufferGeometry().setFromPoints([from, to]);
        this.leaders.add(new THREE.Line(geom, new THREE.LineBasicMaterial({ color: 0xff3355 })));
        const tag = makeTextSprite(id);
        tag.position.copy(from);
        this.leaders.add(tag);
      }
    }
  }

  /** Billboarding: sprites face the camera automatically; this keeps their
   * screen size stable as the camera moves. */
  render(): void {
    if (this.paused) return;
    const w = this.canvas.clientWidth;
    const h = this.canvas.clientHeight;
    if (this.canvas.width !== w || this.canvas.height !== h) {
      this.webgl.setSize(w, h, false);
      this.camera.aspect = w / h;
      this.camera.updateProjectionMatrix();
    }
    this.webgl.render(this.scene, this.camera);
  }
}

function makeTextSprite(text: string): THREE.Sprite {
  const canvas = document.createElement("canvas");
  const ctx = canvas.getContext("2d")!;
  const pad = 8;
  ctx.font = "28px system-ui, sans-serif";
  canvas.width = Math.ceil(ctx.measureText(text).width) + pad * 2;
  canvas.height = 40;
  ctx.font = "28px system-ui, sans-serif";
  ctx.fillStyle = "rgba(16, 19, 26, 0.75)";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#f5f5f5";
  ctx.textBaseline = "middle";
  ctx.fillText(text, pad, canvas.height / 2);
  const texture = new THREE.CanvasTexture(canvas);
  const material = new THREE.SpriteMaterial({ map: texture, depthTest: false });
  const sprite = new THREE.Sprite(material);
  sprite.scale.set(canvas.width / 1600, canvas.height / 1600, 1);
  return sprite;
}

function disposeDeep(obj: THREE.Object3D): void {
  obj.traverse((child) => {
    const any = child as THREE.Mesh;
    if (any.geometry) any.geometry.dispose();
    const mat = any.material as THREE.Material | THREE.Material[] | undefined;
    if (Array.isArray(mat)) mat.forEach((m) => m.dispose());
    else if (mat) mat.dispose();
  });
}
